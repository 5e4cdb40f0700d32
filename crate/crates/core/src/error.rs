use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A wedge product or blade would exceed the ambient dimension.
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The operation is defined, but not for this kind of input
    /// (e.g. a Hodge star on a Lorentzian frame).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("metric is degenerate")]
    DegenerateMetric,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data contradicts itself, e.g. curvature components that clash
    /// under the algebraic symmetries.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("operator does not commute with the Hodge star (max violation {max_violation:e})")]
    NotCommuting { max_violation: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
