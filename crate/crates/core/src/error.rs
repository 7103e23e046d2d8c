use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a documented range or invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Inputs are individually valid but cannot be combined.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node {0}")]
    UnknownNode(u32),

    /// Statistical procedure is undefined for the given data.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
