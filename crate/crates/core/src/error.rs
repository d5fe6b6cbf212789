//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Particle weights cannot be renormalized into a distribution.
    #[error("degenerate particle weights: {0}")]
    DegenerateWeights(String),

    /// An operation was called on a state that cannot serve it.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A file exists but its contents do not match the expected format.
    #[error("{file}: format error: {reason}")]
    Format { file: String, reason: String },

    /// A text record failed to parse; `line` is 1-based.
    #[error("line {line}: parse error: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn format(file: &std::path::Path, reason: impl Into<String>) -> Self {
        Error::Format {
            file: file.display().to_string(),
            reason: reason.into(),
        }
    }
}
