use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the range the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computed quantity violated an invariant that the mathematics guarantees.
    /// Indicates a numerical or logic bug rather than bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Not enough data to fit an exponent.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Block enumeration would exceed the state budget.
    #[error("refused: {0}")]
    Refused(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
