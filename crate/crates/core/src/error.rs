use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigen solver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("tangent vector too large (spectral size {0:e})")]
    TangentTooLarge(f64),

    #[error("point lies outside the chart: {0}")]
    OutsideChart(&'static str),

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate finite-difference metric (determinant {0:e}); adjust the step size")]
    DegenerateMetric(f64),

    #[error("mixture component {component} emptied twice during EM")]
    EmptyComponent { component: usize },

    #[error("quadrature grid too coarse (estimated error {0:e})")]
    CoarseGrid(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
