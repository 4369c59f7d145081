use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported bit depth {0} (expected 8, 10, 12 or 16)")]
    BitDepth(u32),

    #[error("unsupported block size {0} (expected 8, 16, 32 or 64)")]
    BlockSize(usize),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    Domain { what: &'static str, value: f64, min: f64, max: f64 },

    #[error("invalid masking parameters: {0}")]
    Params(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("dimension mismatch: {0}")]
    Dimensions(String),

    #[error("sample value {value} at {plane} plane offset {offset} does not fit in {bit_depth} bits")]
    SampleRange { plane: &'static str, offset: usize, value: u32, bit_depth: u32 },

    #[error("{path}: frame {frame} is truncated ({available} of {expected} bytes)")]
    Truncated { path: PathBuf, frame: usize, available: usize, expected: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn domain(what: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::Domain { what, value, min, max }
    }
}
