use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("accuracy error: {msg} (achieved {achieved:e})")]
    Accuracy { msg: String, achieved: f64 },
    #[error("coverage error: {msg} (max certifiable t = {max_t:.4})")]
    Coverage { msg: String, max_t: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Range(msg.into()))
}
