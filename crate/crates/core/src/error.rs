use thiserror::Error;

/// Errors raised by the solvers, generators and I/O helpers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
