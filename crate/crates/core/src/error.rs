use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {requested} exceeds the configured cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("not a projector: {0}")]
    NotProjector(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("process is not stationary (deviation {0:e})")]
    NonStationary(f64),

    #[error("projected state has negligible weight {0:e}")]
    ZeroOverlap(f64),

    #[error("orbit join did not converge after {samples} samples (rank {rank})")]
    NonConvergence { samples: usize, rank: usize },

    #[error("orbit join failed invariance verification (residual {0:e})")]
    InvarianceViolated(f64),

    #[error("singular linear system")]
    Singular,

    #[error("not implemented: {0}")]
    NotImplemented(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
