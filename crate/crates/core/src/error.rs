//! Crate-wide error type.
//!
//! Variants map onto the CLI exit-code contract: configuration, range and
//! shape problems (and I/O) exit with 1, malformed data files with 2,
//! numerical failures with 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration values (nonpositive extents, bad fractions,
    /// inconsistent preset references, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An index or extent outside its permitted range.
    #[error("range error: {0}")]
    Range(String),

    /// Mismatched vector/matrix dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// A malformed dataset, checkpoint or report file.
    #[error("{path}:{line}: format error: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    /// Numerical failure (singular system, non-finite values).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Degenerate input for which the operation is undefined (e.g. an
    /// all-zero channel matrix handed to the precoder extractor).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable process exit code for this error class:
    /// 1 usage/config, 2 data format, 3 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Range(_) | Error::Shape(_) | Error::Io(_) => 1,
            Error::Format { .. } => 2,
            Error::Numerical(_) | Error::Degenerate(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
