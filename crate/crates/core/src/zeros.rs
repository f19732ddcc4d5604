//! Zeros of the imaginary part: location, counting, tracking in time, and
//! the quotient maximum-principle monitor.
//!
//! Because the imaginary part satisfies a linear parabolic equation in
//! disguise (`b_t = b_xx + 2ab` is linear in `b`), its number of sign
//! changes cannot increase in time; the tracker records any increase as a
//! discretization artifact. The distinguished zero `gamma(t)` is defined on
//! samples where exactly one zero exists, and its limit at the detected
//! blow-up time is compared against the reported blow-up position.

use crate::error::{CoreError, Result};
use crate::grid::{sup_abs, PdeState, SpatialGrid};
use crate::solver::BlowupReport;

/// Zeros of a sampled field: one per strict sign change between adjacent
/// nodes (located by linear interpolation); an exact-zero node flanked by
/// opposite signs counts once; plateaus of exact zeros collapse to their
/// midpoint.
pub fn find_zeros(b: &[f64], grid: &SpatialGrid) -> Vec<f64> {
    let n = b.len();
    let mut zeros = Vec::new();
    let mut i = 0;
    while i < n {
        if b[i] == 0.0 {
            let start = i;
            while i < n && b[i] == 0.0 {
                i += 1;
            }
            // plateau [start, i-1] collapses to its midpoint
            zeros.push(0.5 * (grid.node(start) + grid.node(i - 1)));
        } else {
            if i + 1 < n && b[i + 1] != 0.0 && (b[i] > 0.0) != (b[i + 1] > 0.0) {
                let x0 = grid.node(i);
                let frac = b[i] / (b[i] - b[i + 1]);
                zeros.push(x0 + frac * grid.spacing());
            }
            i += 1;
        }
    }
    zeros
}

/// Number of zeros `find_zeros` would report, without allocating positions.
pub fn zero_count(b: &[f64]) -> usize {
    let n = b.len();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        if b[i] == 0.0 {
            while i < n && b[i] == 0.0 {
                i += 1;
            }
            count += 1;
        } else {
            if i + 1 < n && b[i + 1] != 0.0 && (b[i] > 0.0) != (b[i + 1] > 0.0) {
                count += 1;
            }
            i += 1;
        }
    }
    count
}

/// Which sign pattern the field takes around its single zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Negative left of the zero, positive right.
    NegativeToPositive,
    PositiveToNegative,
}

#[derive(Debug, Clone)]
pub struct ZeroSample {
    pub t: f64,
    pub zeros: Vec<f64>,
    pub count: usize,
    /// The distinguished zero, defined exactly when `count == 1`.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ZeroTrack {
    pub samples: Vec<ZeroSample>,
    /// Indices of samples whose zero count exceeds the previous sample's.
    pub monotonicity_violations: Vec<usize>,
    /// Set when some sampled field was identically zero.
    pub degenerate: bool,
    /// Continuations whose nearest-zero match was ambiguous (broken toward
    /// smaller x).
    pub ties_flagged: usize,
    /// Sign pattern around gamma on the last single-zero sample.
    pub orientation: Option<Orientation>,
}

impl ZeroTrack {
    /// Times and values of gamma on the samples where it is defined.
    pub fn gamma_series(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| s.gamma.map(|g| (s.t, g)))
            .collect()
    }
}

/// Tracks zeros across a time-ordered history.
pub fn track(history: &[PdeState]) -> ZeroTrack {
    let mut samples = Vec::with_capacity(history.len());
    let mut violations = Vec::new();
    let mut degenerate = false;
    let mut ties = 0usize;
    let mut orientation = None;
    let mut prev_count: Option<usize> = None;
    let mut prev_zero: Option<f64> = None;

    for (si, state) in history.iter().enumerate() {
        if state.b.iter().all(|&v| v == 0.0) {
            degenerate = true;
            samples.push(ZeroSample {
                t: state.t,
                zeros: Vec::new(),
                count: 0,
                gamma: None,
            });
            prev_count = Some(0);
            continue;
        }
        let zeros = find_zeros(&state.b, &state.grid);
        let count = zeros.len();
        if let Some(pc) = prev_count {
            if count > pc {
                violations.push(si);
            }
        }
        // Continuation: follow the nearest zero to the previous tracked one,
        // breaking exact ties toward smaller x.
        let followed = match (prev_zero, zeros.len()) {
            (_, 0) => None,
            (None, _) => Some(zeros[0]),
            (Some(p), _) => {
                let mut best = zeros[0];
                let mut best_d = (zeros[0] - p).abs();
                for &z in &zeros[1..] {
                    let d = (z - p).abs();
                    if d < best_d {
                        best = z;
                        best_d = d;
                    } else if d == best_d && z < best {
                        ties += 1;
                        best = z;
                    }
                }
                Some(best)
            }
        };
        prev_zero = followed.or(prev_zero);

        let gamma = if count == 1 { Some(zeros[0]) } else { None };
        if let Some(g) = gamma {
            orientation = orientation_at(&state.b, &state.grid, g);
        }
        samples.push(ZeroSample {
            t: state.t,
            zeros,
            count,
            gamma,
        });
        prev_count = Some(count);
    }

    ZeroTrack {
        samples,
        monotonicity_violations: violations,
        degenerate,
        ties_flagged: ties,
        orientation,
    }
}

fn orientation_at(b: &[f64], grid: &SpatialGrid, gamma: f64) -> Option<Orientation> {
    let left = b
        .iter()
        .enumerate()
        .rev()
        .find(|(i, v)| grid.node(*i) < gamma && **v != 0.0)
        .map(|(_, v)| *v)?;
    if left < 0.0 {
        Some(Orientation::NegativeToPositive)
    } else {
        Some(Orientation::PositiveToNegative)
    }
}

/// Extrapolated zero position at the estimated blow-up time, compared with
/// the reported blow-up point.
#[derive(Debug, Clone, Copy)]
pub struct GammaAtBlowup {
    pub gamma_t: f64,
    pub gap: f64,
    /// Gap within three grid spacings of the blow-up position.
    pub agrees: bool,
}

/// Linear extrapolation of gamma from the last two single-zero samples to
/// `t_est`. Returns `None` when the run did not blow up or no single-zero
/// samples exist.
pub fn gamma_at_blowup(
    track: &ZeroTrack,
    report: &BlowupReport,
    grid: &SpatialGrid,
) -> Option<GammaAtBlowup> {
    if !report.blew_up {
        return None;
    }
    let t_est = report.t_est?;
    let x_blowup = report.x_blowup?;
    let series = track.gamma_series();
    let (t2, g2) = *series.last()?;
    let gamma_t = if series.len() >= 2 {
        let (t1, g1) = series[series.len() - 2];
        if t2 > t1 {
            g2 + (g2 - g1) / (t2 - t1) * (t_est - t2)
        } else {
            g2
        }
    } else {
        g2
    };
    let gap = (gamma_t - x_blowup).abs();
    Some(GammaAtBlowup {
        gamma_t,
        gap,
        agrees: gap <= 3.0 * grid.spacing(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct QuotientSample {
    pub t: f64,
    /// Sup of `a/b` over the region interior at this time.
    pub interior_sup: f64,
    /// Running sup of `a/b` over the parabolic boundary (initial slice plus
    /// region edges up to this time).
    pub boundary_sup: f64,
}

/// Time series of the quotient `a/b` over a region where `b` stays above a
/// positive floor. The discrete maximum principle predicts the interior sup
/// never exceeds the parabolic-boundary sup by more than a discretization
/// tolerance, because the quotient satisfies a parabolic equation with
/// nonpositive source where `b > 0`.
#[derive(Debug, Clone)]
pub struct QuotientMonitor {
    pub region: (f64, f64),
    pub delta_floor: f64,
    pub samples: Vec<QuotientSample>,
    /// Time at which `b` first dipped below the floor, if it did.
    pub stopped_at: Option<f64>,
}

impl QuotientMonitor {
    /// Whether every sample satisfies the discrete maximum principle bound.
    pub fn max_principle_holds(&self, tol: f64) -> bool {
        self.samples
            .iter()
            .all(|s| s.interior_sup <= s.boundary_sup + tol)
    }

    pub fn max_quotient(&self) -> f64 {
        self.samples
            .iter()
            .fold(f64::NEG_INFINITY, |m, s| m.max(s.interior_sup))
    }
}

/// Monitors `sup a/b` over `region` across a time-ordered history.
pub fn quotient_monitor(
    history: &[PdeState],
    region: (f64, f64),
    delta_floor: f64,
) -> Result<QuotientMonitor> {
    if history.is_empty() {
        return Err(CoreError::InvalidScenario("empty history".into()));
    }
    if !(delta_floor > 0.0) {
        return Err(CoreError::InvalidScenario(format!(
            "delta_floor must be positive, got {delta_floor}"
        )));
    }
    let grid = &history[0].grid;
    let (lo, hi) = region;
    let idx: Vec<usize> = (0..grid.n_points())
        .filter(|&i| {
            let x = grid.node(i);
            x >= lo && x <= hi
        })
        .collect();
    if idx.len() < 3 {
        return Err(CoreError::InvalidScenario(
            "region must contain at least three grid nodes".into(),
        ));
    }

    let mut samples = Vec::new();
    let mut stopped_at = None;
    let mut boundary_sup = f64::NEG_INFINITY;
    let (first, last) = (idx[0], *idx.last().unwrap());

    for (si, state) in history.iter().enumerate() {
        if idx.iter().any(|&i| state.b[i] < delta_floor) {
            stopped_at = Some(state.t);
            break;
        }
        if si == 0 {
            for &i in &idx {
                boundary_sup = boundary_sup.max(state.a[i] / state.b[i]);
            }
        } else {
            boundary_sup = boundary_sup
                .max(state.a[first] / state.b[first])
                .max(state.a[last] / state.b[last]);
        }
        let mut interior_sup = f64::NEG_INFINITY;
        for &i in &idx {
            interior_sup = interior_sup.max(state.a[i] / state.b[i]);
        }
        samples.push(QuotientSample {
            t: state.t,
            interior_sup,
            boundary_sup,
        });
    }

    Ok(QuotientMonitor {
        region,
        delta_floor,
        samples,
        stopped_at,
    })
}

/// Default quotient floor: `1e-3` of the initial sup of `b`.
pub fn default_delta_floor(initial_b: &[f64]) -> f64 {
    1e-3 * sup_abs(initial_b)
}
