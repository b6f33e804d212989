use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {message} (residual estimate {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("unsupported cycle: no closed form for {0}")]
    UnsupportedCycle(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
