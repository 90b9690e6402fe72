//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, fitting, and I/O operations.
#[derive(Debug, Error)]
pub enum PfrError {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two curves (or a curve and a model) live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A linear solve or eigendecomposition could not be completed.
    #[error("solve failure: {0}")]
    SolveFailure(String),

    /// Malformed input while parsing a file or serialized object.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A serialized model declares a version this build does not read.
    #[error("unsupported model version {found:?} (expected {expected})")]
    UnsupportedVersion { found: String, expected: u32 },

    /// A configuration failed validation; all offending fields are listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PfrError>;

impl PfrError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        PfrError::InvalidArgument(msg.into())
    }
}
