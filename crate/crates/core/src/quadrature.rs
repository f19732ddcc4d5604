//! Quadrature against the Gaussian weight `rho(y) = exp(-y^2/4)`.
//!
//! Weights come from the trapezoid rule on a uniform grid truncated at
//! `|y| = half_width`. Because the integrand decays like a Gaussian, the
//! truncated trapezoid rule is accurate far beyond its nominal order: for
//! `half_width >= 10` the tail and discretization errors are both below
//! double-precision noise for polynomial-times-Gaussian integrands.
//!
//! All reductions accumulate in ascending node order so results do not
//! depend on how callers parallelize around this module.

use crate::error::{CoreError, Result};
use crate::grid::check_finite;

/// `∫ rho(y) dy = 2 sqrt(pi)` over the whole line.
pub const RHO_MASS: f64 = 3.5449077018110318;

/// Relative tolerance the weight sum is verified against at build time.
pub const QUADRATURE_TOL: f64 = 1e-8;

pub fn rho(y: f64) -> f64 {
    (-0.25 * y * y).exp()
}

/// Nodes and positive weights approximating `∫ f(y) rho(y) dy`.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature {
    pub y_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    half_width: f64,
    spacing: f64,
}

/// Builds the trapezoid rule for the weight `rho` on `[-half_width_y, half_width_y]`.
///
/// `n_nodes` must be odd so that `y = 0` is a node; `half_width_y >= 10` keeps
/// the discarded Gaussian tail below double-precision relevance.
pub fn build_quadrature(half_width_y: f64, n_nodes: usize) -> Result<WeightedQuadrature> {
    if !(half_width_y.is_finite() && half_width_y > 0.0) {
        return Err(CoreError::InvalidQuadrature(format!(
            "half_width_y must be positive, got {half_width_y}"
        )));
    }
    if half_width_y < 10.0 {
        return Err(CoreError::InvalidQuadrature(format!(
            "half_width_y must be >= 10 to keep the truncated tail negligible, got {half_width_y}"
        )));
    }
    if n_nodes % 2 == 0 {
        return Err(CoreError::InvalidQuadrature(format!(
            "n_nodes must be odd so that y = 0 is a node, got {n_nodes}"
        )));
    }
    if n_nodes < 16 {
        return Err(CoreError::InvalidQuadrature(format!(
            "n_nodes must be >= 16, got {n_nodes}"
        )));
    }
    let spacing = 2.0 * half_width_y / (n_nodes - 1) as f64;
    let mid = (n_nodes - 1) / 2;
    let y_nodes: Vec<f64> = (0..n_nodes)
        .map(|i| (i as isize - mid as isize) as f64 * spacing)
        .collect();
    let weights: Vec<f64> = y_nodes
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let end = i == 0 || i == n_nodes - 1;
            let w = spacing * rho(y);
            if end {
                0.5 * w
            } else {
                w
            }
        })
        .collect();

    let sum: f64 = weights.iter().sum();
    if (sum - RHO_MASS).abs() > QUADRATURE_TOL * RHO_MASS {
        return Err(CoreError::InvalidQuadrature(format!(
            "weight sum {sum:.12e} deviates from 2*sqrt(pi) beyond tolerance"
        )));
    }

    Ok(WeightedQuadrature {
        y_nodes,
        weights,
        half_width: half_width_y,
        spacing,
    })
}

impl WeightedQuadrature {
    pub fn len(&self) -> usize {
        self.y_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_nodes.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn check_field(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(CoreError::FieldLength {
                got: f.len(),
                expected: self.len(),
            });
        }
        check_finite(f)
    }

    /// `‖f‖_rho^2 = ∫ f^2 rho dy`.
    pub fn rho_norm_sq(&self, f: &[f64]) -> Result<f64> {
        self.check_field(f)?;
        let mut acc = 0.0;
        for i in 0..f.len() {
            acc += self.weights[i] * f[i] * f[i];
        }
        Ok(acc)
    }

    /// `⟨f, g⟩_rho = ∫ f g rho dy`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_field(f)?;
        self.check_field(g)?;
        let mut acc = 0.0;
        for i in 0..f.len() {
            acc += self.weights[i] * f[i] * g[i];
        }
        Ok(acc)
    }

    /// Weighted H^1 seminorm sum: `‖f‖_rho^2 + ‖f'‖_rho^2`.
    pub fn h1_norm_sq(&self, f: &[f64], f_prime: &[f64]) -> Result<f64> {
        Ok(self.rho_norm_sq(f)? + self.rho_norm_sq(f_prime)?)
    }

    /// `∫ y^2 f^2 rho dy`.
    pub fn second_moment(&self, f: &[f64]) -> Result<f64> {
        self.check_field(f)?;
        let mut acc = 0.0;
        for i in 0..f.len() {
            let yf = self.y_nodes[i] * f[i];
            acc += self.weights[i] * yf * yf;
        }
        Ok(acc)
    }
}

/// Second-order finite-difference derivative: centered in the interior,
/// one-sided three-point stencils at the ends.
pub fn central_derivative(f: &[f64], spacing: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    let inv2 = 1.0 / (2.0 * spacing);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv2;
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
    out
}

/// Outcome of the weighted embedding test
/// `∫ y^2 f^2 rho dy <= 16 ‖f'‖_rho^2 + 4 ‖f‖_rho^2`.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks the weighted embedding inequality with constants (16, 4).
pub fn check_weighted_embedding(
    quad: &WeightedQuadrature,
    f: &[f64],
    f_prime: &[f64],
) -> Result<EmbeddingCheck> {
    let lhs = quad.second_moment(f)?;
    let rhs = 16.0 * quad.rho_norm_sq(f_prime)? + 4.0 * quad.rho_norm_sq(f)?;
    Ok(EmbeddingCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}
