use std::path::PathBuf;

/// Errors of the configuration, orchestration and output layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {constraint}")]
    Validation { key: String, constraint: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Core(#[from] warplab_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(key: impl Into<String>, constraint: impl Into<String>) -> Error {
    Error::Validation {
        key: key.into(),
        constraint: constraint.into(),
    }
}
