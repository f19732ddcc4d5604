//! Closed-form spatially homogeneous solutions of `z_t = z^2`.
//!
//! Writing `z = a + ib`, the space-independent system is
//! `a_t = a^2 - b^2`, `b_t = 2ab`, solved exactly by
//!
//! ```text
//! a(t) = (T1 - t) / ((T1 - t)^2 + T2^2),   b(t) = T2 / ((T1 - t)^2 + T2^2),
//! T1 = a0 / (a0^2 + b0^2),                 T2 = b0 / (a0^2 + b0^2).
//! ```
//!
//! The solution blows up in finite time exactly when `T2 = 0` and `T1 > 0`
//! (real, positive data); for `b0 != 0` it exists globally and decays. For
//! `a0 < 0, b0 = 0` the pole sits at negative time, so the solution decays
//! like `1/(T1 - t)` and is also classified global.

use crate::error::{CoreError, Result};

/// Exact spatially homogeneous solution, used as the oracle for the PDE solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeSolution {
    /// The identically zero solution (zero initial data).
    Zero,
    Generic { t1: f64, t2: f64, a0: f64, b0: f64 },
}

pub fn ode_solve(a0: f64, b0: f64) -> OdeSolution {
    if a0 == 0.0 && b0 == 0.0 {
        return OdeSolution::Zero;
    }
    let r = a0 * a0 + b0 * b0;
    OdeSolution::Generic {
        t1: a0 / r,
        t2: b0 / r,
        a0,
        b0,
    }
}

impl OdeSolution {
    pub fn blows_up(&self) -> bool {
        matches!(self, OdeSolution::Generic { t1, t2, .. } if *t2 == 0.0 && *t1 > 0.0)
    }

    pub fn blow_up_time(&self) -> Option<f64> {
        match self {
            OdeSolution::Generic { t1, t2, .. } if *t2 == 0.0 && *t1 > 0.0 => Some(*t1),
            _ => None,
        }
    }

    /// Evaluates `(a(t), b(t))`. Valid for `0 <= t < T1` when the solution
    /// blows up and for any `t >= 0` otherwise.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(CoreError::OutOfDomain { t });
        }
        match *self {
            OdeSolution::Zero => Ok((0.0, 0.0)),
            OdeSolution::Generic { t1, t2, .. } => {
                if self.blows_up() && t >= t1 {
                    return Err(CoreError::OutOfDomain { t });
                }
                let d = t1 - t;
                let denom = d * d + t2 * t2;
                Ok((d / denom, t2 / denom))
            }
        }
    }
}

/// Convenience wrapper matching the solution accessor layout.
pub fn ode_eval(sol: &OdeSolution, t: f64) -> Result<(f64, f64)> {
    sol.eval(t)
}
