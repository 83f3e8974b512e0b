//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Instance or score shape disagrees with the stream schema.
    #[error("schema mismatch: {0}")]
    Schema(String),

    /// A raw score was negative or non-finite.
    #[error("invalid score: {0}")]
    InvalidScore(String),

    /// Internal bookkeeping invariant violated (a bug, not bad input).
    #[error("internal consistency: {0}")]
    Internal(String),

    /// Weight solve requested on an ensemble with no components.
    #[error("ensemble has no components")]
    NoComponents,

    /// Operation requires a non-empty chunk/window/stream.
    #[error("empty input: {0}")]
    Empty(String),

    /// Malformed stream file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Bad run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
