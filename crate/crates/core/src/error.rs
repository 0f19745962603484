use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no preferences: cannot build a preference graph from an empty observation set")]
    NoPreferences,

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("type mismatch in {operation}: {message}")]
    TypeMismatch {
        operation: &'static str,
        message: String,
    },

    #[error("walk enumeration exceeded the cap of {cap} walks")]
    WalkLimit { cap: usize },

    #[error("user {0} is not part of the graph roster")]
    UnknownUser(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no eligible users: every user needs at least {threshold} ratings (UPL {upl} + 10 test items)")]
    NoEligibleUsers { upl: usize, threshold: usize },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("line {line}: rating {value} is outside the declared scale {scale}")]
    Scale {
        line: usize,
        value: f64,
        scale: String,
    },

    #[error("line {line}: duplicate rating for user {user}, item {item} (first seen on line {first_line})")]
    Duplicate {
        line: usize,
        first_line: usize,
        user: String,
        item: String,
    },

    #[error("snapshot is not a preference-graph snapshot")]
    BadMagic,

    #[error("snapshot format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("snapshot checksum failure in section {section}")]
    Checksum { section: String },

    #[error("{context}: {source}")]
    Stage {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn mismatch(operation: &'static str, message: impl Into<String>) -> Self {
        Error::TypeMismatch {
            operation,
            message: message.into(),
        }
    }

    /// Wraps the error with a description of the pipeline stage that failed.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Stage {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
