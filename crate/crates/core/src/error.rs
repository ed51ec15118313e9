use thiserror::Error;

/// Errors raised while building or running a link.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid modulation: {0}")]
    Modulation(String),

    #[error("invalid code: {0}")]
    Code(String),

    #[error("invalid activation pattern: {0}")]
    Pattern(String),

    #[error("bit length mismatch: expected {expected}, got {actual}")]
    BitLength { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid analysis input: {0}")]
    Analysis(String),

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("config `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
