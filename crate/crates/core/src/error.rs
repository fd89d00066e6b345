use thiserror::Error;

/// Errors surfaced by the numerics and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: {context} requires at least {min} samples, got {got}")]
    GridTooSmall {
        context: &'static str,
        min: usize,
        got: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("basis index {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },
    #[error("incompatible quadrature: {0}")]
    IncompatibleQuadrature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("solver produced a non-finite state at step {step}")]
    SolverDiverged { step: usize },
    #[error("oracle self-test failed: {name} (metric {value})")]
    OracleSelfTest { name: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
