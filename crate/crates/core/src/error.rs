use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] io::Error),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("missing token: {0:?}")]
    MissingToken(String),

    #[error("vector for {0:?} has zero norm")]
    ZeroNorm(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty vocabulary: {0}")]
    EmptyVocabulary(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("no usable antonym pairs for dimension {name:?} (skipped: {skipped})")]
    NoUsablePairs { name: String, skipped: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("survey data error: {0}")]
    Survey(String),

    #[error("resampling aborted: {failed} of {total} replicates failed ({reason})")]
    TooManyFailures {
        failed: usize,
        total: usize,
        reason: String,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for errors that make a statistic undefined on one resampled
    /// embedding without invalidating the whole run.
    pub fn is_replicate_failure(&self) -> bool {
        matches!(
            self,
            Error::MissingToken(_) | Error::ZeroNorm(_) | Error::NoUsablePairs { .. } | Error::EmptyVocabulary(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
