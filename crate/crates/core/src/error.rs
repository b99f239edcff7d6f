use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the decipherment toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A transcription token could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// An argument fell outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A data file was malformed.
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// The exhaustive decoder refused a lattice with too many paths.
    #[error("lattice has {paths} paths, exhaustive search is limited to {limit}")]
    TooLarge { paths: u128, limit: u128 },

    /// The external scorer process misbehaved.
    #[error("scorer protocol error: {0}")]
    Protocol(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
