use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line front-end.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag combination or value.
    #[error("usage: {0}")]
    Usage(String),
    /// A numerical routine failed.
    #[error(transparent)]
    Numerics(#[from] blockfade_core::Error),
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// CSV encoding or decoding failed.
    #[error("{path}: {source}")]
    Csv {
        /// File involved (`-` for standard streams).
        path: PathBuf,
        /// Underlying error.
        source: csv::Error,
    },
    /// A CSV record or config line could not be interpreted.
    #[error("{path}:{line}: {message}")]
    Parse {
        /// File involved.
        path: PathBuf,
        /// 1-based line number.
        line: usize,
        /// What went wrong.
        message: String,
    },
}

/// Result alias for the front-end.
pub type Result<T> = std::result::Result<T, CliError>;
