use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("truncation budget exceeded: tail mass {tail:.3e} > {budget:.3e}")]
    Truncation { tail: f64, budget: f64 },
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("claim falsified: {0}")]
    Falsified(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
