use thiserror::Error;

/// Crate-wide error type. The split matters to the CLI: `Parse` and
/// `Validation` are user errors (exit code 1), `Internal` means a
/// mathematical invariant that should hold unconditionally was observed to
/// fail (exit code 2, a bug signal).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Validation(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
