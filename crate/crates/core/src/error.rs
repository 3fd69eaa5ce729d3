//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("matrix is not positive definite (pivot {pivot} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },

    #[error("oracle evaluation failed: {0}")]
    OracleFailure(String),

    #[error("replicate {outer}/{inner} failed: {source}")]
    ReplicateFailure {
        /// Outer (pseudo-dataset) index, 1-based.
        outer: usize,
        /// Inner (perturbation) index, 1-based.
        inner: usize,
        source: Box<Error>,
    },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("report serialization failed: {0}")]
    Serialize(String),

    #[error("report parse failed: {0}")]
    Parse(String),
}

impl Error {
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a failure that occurred while computing the Hessian estimate for
    /// pseudo-dataset `outer`, perturbation `inner` (both 1-based).
    pub fn in_replicate(self, outer: usize, inner: usize) -> Self {
        Error::ReplicateFailure {
            outer,
            inner,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
