use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error("unknown {kind} label `{label}`")]
    Vocabulary { kind: &'static str, label: String },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown or empty cluster {0}")]
    UnknownCluster(u32),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("schema error at {locator}: {message}")]
    Schema { locator: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A pipeline stage failed; `stage` names it.
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        match self {
            already @ Error::Stage { .. } => already,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Pipeline stage named by a [`Error::Stage`], if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub(crate) fn schema(locator: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            locator: locator.into(),
            message: message.into(),
        }
    }
}
