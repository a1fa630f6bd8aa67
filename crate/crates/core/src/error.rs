use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model or experiment parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A rectangle could not be cut into squares of the requested side.
    #[error("tessellation error: {0}")]
    Tessellation(String),
    /// A statistical or structural self-check failed (e.g. a criterion that
    /// should be monotone was not).
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
