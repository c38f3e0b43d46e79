//! Error type shared by every module.

use thiserror::Error;

/// Library-wide error type.
///
/// The CLI maps usage-class errors to exit status 2 and
/// precision/resource failures to exit status 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// Process exit status used by the CLI: 0 success, 2 usage, 3 precision/resource.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Domain(_) | Error::InsufficientData(_) => 2,
            Error::Precision(_) | Error::Resource(_) | Error::Io(_) => 3,
        }
    }
}
