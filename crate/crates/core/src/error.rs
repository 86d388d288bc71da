use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("outside analyticity strip: {0}")]
    Strip(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
