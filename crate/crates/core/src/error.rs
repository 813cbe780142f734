use thiserror::Error;

/// Errors raised by the exact dynamics, block and measure routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("block {0} is not primitive")]
    NotPrimitive(String),

    #[error("alpha = {0} has no matching; use the series density instead")]
    NotMatching(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("continued fraction quotient does not fit in 64 bits")]
    QuotientOverflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
