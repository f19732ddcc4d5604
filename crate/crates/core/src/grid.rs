//! Uniform symmetric grids and sampled field state.

use crate::error::{CoreError, Result};

/// Uniform grid on `[-half_width, half_width]` with an odd number of nodes,
/// so that `x = 0` is a node (exactly, by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
}

impl SpatialGrid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(CoreError::InvalidGrid(format!(
                "n_points must be odd and >= 3, got {n_points}"
            )));
        }
        let spacing = 2.0 * half_width / (n_points - 1) as f64;
        Ok(Self {
            half_width,
            n_points,
            spacing,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the node at `x = 0`.
    pub fn mid_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Node position. Computed relative to the center node so the grid is
    /// exactly symmetric and `node(mid_index()) == 0.0`.
    pub fn node(&self, i: usize) -> f64 {
        let mid = self.mid_index() as isize;
        (i as isize - mid) as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// First node position (nominally `-half_width` up to rounding).
    pub fn x_min(&self) -> f64 {
        self.node(0)
    }
}

/// Real and imaginary parts `(a, b)` of `z = a + ib` sampled on a grid at time `t`.
#[derive(Debug, Clone)]
pub struct PdeState {
    pub grid: SpatialGrid,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl PdeState {
    pub fn new(grid: SpatialGrid, a: Vec<f64>, b: Vec<f64>, t: f64) -> Result<Self> {
        for f in [&a, &b] {
            if f.len() != grid.n_points() {
                return Err(CoreError::FieldLength {
                    got: f.len(),
                    expected: grid.n_points(),
                });
            }
        }
        check_finite(&a)?;
        check_finite(&b)?;
        Ok(Self { grid, a, b, t })
    }

    /// Builds the state by evaluating closures at every node.
    pub fn from_fns(
        grid: SpatialGrid,
        fa: impl Fn(f64) -> f64,
        fb: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let a: Vec<f64> = (0..grid.n_points()).map(|i| fa(grid.node(i))).collect();
        let b: Vec<f64> = (0..grid.n_points()).map(|i| fb(grid.node(i))).collect();
        Self::new(grid, a, b, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|v| v.is_finite())
    }

    /// `max_i sqrt(a_i^2 + b_i^2)`, the sup of `|z|` over the grid.
    pub fn sup_z(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.a.len() {
            m = m.max((self.a[i] * self.a[i] + self.b[i] * self.b[i]).sqrt());
        }
        m
    }
}

/// Sup norm of a field, scanned in fixed index order.
pub fn sup_abs(f: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &v in f {
        m = m.max(v.abs());
    }
    m
}

pub(crate) fn check_finite(f: &[f64]) -> Result<()> {
    for (i, v) in f.iter().enumerate() {
        if !v.is_finite() {
            return Err(CoreError::NonFiniteField { index: i });
        }
    }
    Ok(())
}
