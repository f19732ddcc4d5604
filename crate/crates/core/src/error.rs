use thiserror::Error;

/// Errors produced by grid construction, quadrature, projections and solvers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("field length {got} does not match grid size {expected}")]
    FieldLength { got: usize, expected: usize },

    #[error("non-finite field value at node {index}")]
    NonFiniteField { index: usize },

    #[error("basis check failed: {0}")]
    BasisCheck(String),

    #[error("quadrature inconsistency: mode energy exceeds field norm by {excess:.3e}")]
    RemainderClamp { excess: f64 },

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("evaluation time {t} is outside the solution domain")]
    OutOfDomain { t: f64 },

    #[error("rescaling requires t < T (got t = {t}, T = {t_blowup})")]
    PastBlowup { t: f64, t_blowup: f64 },

    #[error("{count} rescaled nodes map outside the physical grid")]
    Truncated { count: usize },

    #[error("constants rejected: {}", .0.join("; "))]
    LedgerRejected(Vec<String>),

    #[error("solver produced a non-finite state at t = {t}")]
    SolverDied { t: f64 },

    #[error("invalid scenario parameters: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
