use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the forecasting pipeline.
///
/// The CLI maps variants onto exit codes through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("load error at row {row}: {message}")]
    Load { row: usize, message: String },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("incompatible inputs: {0}")]
    Compat(String),

    #[error("{0}")]
    Invalid(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code taxonomy: 2 config/usage, 3 data, 4 numeric, 5 compatibility.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Invalid(_) => 2,
            Error::Data(_) | Error::Load { .. } | Error::Io { .. } | Error::Csv(_) => 3,
            Error::Json(_) => 3,
            Error::NonFinite(_) | Error::Shape(_) => 4,
            Error::Compat(_) => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
