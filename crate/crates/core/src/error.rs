use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the ingest → factorize → select → report chain.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {index} out of bounds in mode {mode}: extent is {extent}")]
    OutOfBounds {
        mode: usize,
        index: usize,
        extent: usize,
    },

    #[error("coordinate has {got} components, tensor order is {expected}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at entry {entry}")]
    NonFinite { entry: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty tensor: {0}")]
    EmptyTensor(&'static str),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("non-finite value in ALS at iteration {iteration}, mode {mode}")]
    Diverged { iteration: usize, mode: usize },

    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid regex: {0}")]
    Regex(#[from] regex::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
