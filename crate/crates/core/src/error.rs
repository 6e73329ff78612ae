use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document is empty")]
    EmptyDocument,

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("input text is blank")]
    EmptyInput,

    #[error("provider error{}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Provider {
        message: String,
        status: Option<u16>,
        retryable: bool,
        attempts: u32,
    },

    #[error("prompt exceeds the model context window: {0}")]
    ContextTooLarge(String),

    #[error("corrupt store snapshot: {0}")]
    CorruptStore(String),

    #[error("vector store is empty")]
    EmptyStore,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("threshold {0} is outside [0, 0.4]")]
    InvalidThreshold(f64),

    #[error("reduction rate {0} is outside [0, 1)")]
    InvalidRate(f64),

    #[error("need at least {needed} samples for clustering, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid reward input: {0}")]
    InvalidReward(String),

    #[error("index out of range: {0}")]
    InvalidIndex(String),

    #[error("corrupt agent file: {0}")]
    CorruptAgentFile(String),

    #[error("template `{template}` {problem}")]
    TemplateArity {
        template: &'static str,
        problem: &'static str,
    },

    #[error("baseline token count is zero")]
    DivisionByZero,

    #[error("training aborted after {samples_completed} samples ({updates_applied} Q-updates): {source}")]
    TrainingAborted {
        samples_completed: usize,
        updates_applied: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    MalformedLine {
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

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn provider(
        message: impl Into<String>,
        status: Option<u16>,
        retryable: bool,
    ) -> Self {
        Error::Provider {
            message: message.into(),
            status,
            retryable,
            attempts: 1,
        }
    }

    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::Provider {
                retryable: true,
                ..
            }
        )
    }
}
