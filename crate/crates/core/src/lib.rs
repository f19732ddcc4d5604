//! Numerical laboratory for finite-time blow-up of the one-dimensional
//! complex-valued semilinear heat equation `z_t = z_xx + z^2`.
//!
//! Splitting `z = a + ib` gives the real system
//! `a_t = a_xx + a^2 - b^2`, `b_t = b_xx + 2ab`. The crate provides
//!
//! - [`grid`]: uniform symmetric grids and sampled `(a, b)` states;
//! - [`quadrature`]: integration against the Gaussian weight `e^{-y^2/4}`
//!   and the weighted embedding inequality;
//! - [`hermite`]: the polynomial eigenbasis of `d^2/dy^2 - (y/2) d/dy` and
//!   low-mode projections;
//! - [`ode`]: the closed-form spatially homogeneous solution, used as the
//!   solver oracle;
//! - [`solver`]: an adaptive method-of-lines integrator that follows
//!   solutions to blow-up and fits the blow-up time and rate;
//! - [`selfsimilar`]: rescaled variables around a blow-up candidate, a
//!   direct integrator for the rescaled system, and mode-dynamics traces;
//! - [`zeros`]: zero tracking for the imaginary part and the quotient
//!   maximum-principle monitor.
//!
//! Reductions use fixed summation order throughout, so identical inputs
//! produce bitwise-identical outputs for any worker count.

pub mod error;
pub mod grid;
pub mod hermite;
pub mod interp;
pub mod ode;
pub mod parallel;
pub mod quadrature;
pub mod selfsimilar;
pub mod solver;
pub mod zeros;

pub use error::{CoreError, Result};
pub use grid::{sup_abs, PdeState, SpatialGrid};
pub use hermite::{build_hermite_basis, project_modes, HermiteBasis, ModeDecomposition};
pub use ode::{ode_eval, ode_solve, OdeSolution};
pub use quadrature::{
    build_quadrature, central_derivative, check_weighted_embedding, EmbeddingCheck,
    WeightedQuadrature, RHO_MASS,
};
pub use selfsimilar::{
    frame_from_fns, kappa_monitor, rescaled_rhs, run_rescaled, search_constants, to_physical,
    to_selfsimilar, validate_constants, window_bound, ConstantsLedger, KappaReport, ModeTrace,
    ModeTraceSample, RescaledConfig, SelfSimilarFrame,
};
pub use solver::{
    adaptive_dt, asymptotic_constant_scenario, rhs, run, step, AsymptoticScenario, BlowupReport,
    Boundary, RateFit, RunOutput, SolverConfig, TrajectorySample,
};
pub use zeros::{
    default_delta_floor, find_zeros, gamma_at_blowup, quotient_monitor, track, zero_count,
    GammaAtBlowup, Orientation, QuotientMonitor, ZeroSample, ZeroTrack,
};
