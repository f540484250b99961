use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("columns of the subspace basis are dependent")]
    DependentColumns,
    #[error("objects belong to different contexts")]
    ContextMismatch,
    #[error("characteristic {p} too small for symmetric power {m}")]
    Characteristic { p: u64, m: usize },
    #[error("instance too large: {what} needs total dimension {dims} (cap {cap})")]
    TooLarge { what: String, dims: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
