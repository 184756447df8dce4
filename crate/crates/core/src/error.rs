use thiserror::Error;

/// Errors surfaced by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The lossy channel (JPEG encode/decode) failed.
    #[error("codec error: {0}")]
    Codec(String),

    /// A bounded-attempt guard ran out of attempts.
    #[error("exhausted: {0}")]
    Exhausted(String),

    /// A text format (key=value config, map files, CSV) failed to parse.
    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
