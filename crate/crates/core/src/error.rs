use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// A parameter is outside the range where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The energy or gradient became non-finite during minimization.
    #[error("non-finite energy encountered at iteration {iteration}")]
    NumericalFailure { iteration: usize },

    /// A configuration file could not be parsed.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
