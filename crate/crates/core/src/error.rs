use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TmaError {
    /// An argument is outside the domain of the operation.
    #[error("{0}")]
    Domain(String),
    /// Two inputs that must agree in size do not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

impl TmaError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        TmaError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, TmaError>;
