//! Crate-wide error type with process exit-code mapping.

use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration, arguments, or input files.
    #[error("config error: {0}")]
    Config(String),
    /// Numerical failure: divergence, non-convergence, or a missing limit cycle.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Analysis case the implementation deliberately does not handle.
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// Exit code contract: 1 for configuration/usage errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 1,
            Error::Numerical(_) | Error::Unsupported(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
