use thiserror::Error;

/// Errors raised by permlab operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what} requires {limit}, got {got}")]
    Guard {
        what: &'static str,
        limit: String,
        got: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, limit: impl Into<String>, got: impl ToString) -> Error {
    Error::Guard {
        what,
        limit: limit.into(),
        got: got.to_string(),
    }
}
