use std::path::PathBuf;

use thiserror::Error;

use crate::morphology::FamilyId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input text is empty")]
    EmptyText,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("vector dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown graph node {0}")]
    UnknownNode(FamilyId),

    #[error("sentence does not contain the target `{0}`")]
    TargetAbsent(String),

    #[error("only {available} distractor candidates with POS {pos}, need {needed}")]
    InsufficientDistractors {
        pos: String,
        needed: usize,
        available: usize,
    },

    #[error("family {family} occurs in {sentences} distinct sentences, need at least 3")]
    InsufficientContext { family: FamilyId, sentences: usize },

    #[error("`{0}` is not one of the activity options")]
    InvalidChoice(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
