//! Crate-wide error type.
//!
//! Every failure is classified so the CLI can map it to an exit code:
//! configuration / validation problems, numerical failures, and I/O.

use thiserror::Error;

#[derive(Clone, Debug, Error)]
pub enum Error {
    /// Invalid input: bad config file, violated parameter invariant, bad argument.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical routine failed to meet its contract.
    #[error("numerical error: {0}")]
    Numerics(String),

    /// Filesystem / serialization failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numerics(msg: impl Into<String>) -> Self {
        Error::Numerics(msg.into())
    }
    pub fn io(msg: impl Into<String>) -> Self {
        Error::Io(msg.into())
    }

    /// Process exit code class for the CLI (0 is success).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Numerics(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
