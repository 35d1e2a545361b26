use thiserror::Error;

/// Errors raised by the algebra, the ensemble layer and the oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("dimension mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("cannot add scalars with scale {left} and {right}")]
    ScaleMismatch { left: String, right: String },

    #[error("expected grade {expected}, found {found}")]
    GradeMismatch { expected: usize, found: String },

    #[error("odd-grade divided powers are not supported (grade {0})")]
    OddGrade(usize),

    #[error("matrix is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),

    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),

    #[error("moment index {index} out of range (have m_0..m_{available})")]
    MomentRange { index: i64, available: i64 },

    #[error("{0} out of range")]
    OutOfRange(String),

    #[error("resource guard: {what} = {size} exceeds ceiling {ceiling}")]
    ResourceGuard {
        what: &'static str,
        size: u128,
        ceiling: u128,
    },

    #[error("pointwise weight unavailable for explicit moment input")]
    UnknownWeight,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-integrable time vector: {0}")]
    NonIntegrable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
