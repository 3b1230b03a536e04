use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds a hard size cap of the chosen method.
    #[error("capacity exceeded: {what} supports n <= {cap}, got {requested}")]
    Capacity {
        what: &'static str,
        cap: usize,
        requested: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A persisted table failed validation on load.
    #[error("invalid table cache (line {line}): {reason}")]
    InvalidCache { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
