use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A computation would exceed a size cap. `required` names what it needs.
    #[error("resource limit exceeded: {what} needs {required}, cap is {cap}")]
    Resource {
        what: String,
        required: String,
        cap: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
