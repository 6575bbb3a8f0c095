use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator, estimators and data ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("venue {venue} has no encounters; positive share is undefined")]
    UndefinedRatio { venue: usize },

    #[error("person {person} has exposure at venue {venue} whose positive share is undefined")]
    MissingShare { person: usize, venue: usize },

    #[error("AUC is undefined: outcomes contain a single class")]
    UndefinedAuc,

    #[error("{path}: line {line}, column `{column}`: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: String,
        message: String,
    },

    #[error("degenerate study: {flagged} of {total} replications flagged")]
    DegenerateStudy { flagged: usize, total: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
