use thiserror::Error;

/// Errors produced by the library. Every variant carries a human-readable message;
/// `kind()` gives a stable machine-readable tag.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UfgError {
    #[error("input error: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("{path}:{line}: {message}")]
    Ingest {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: empty sample")]
    EmptySample { path: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl UfgError {
    pub fn kind(&self) -> &'static str {
        match self {
            UfgError::Input(_) => "input",
            UfgError::Config(_) => "config",
            UfgError::Resource(_) => "resource",
            UfgError::Unsupported(_) => "unsupported",
            UfgError::Ingest { .. } => "ingest",
            UfgError::EmptySample { .. } => "empty_sample",
            UfgError::Io(_) => "io",
        }
    }

    pub fn line(&self) -> Option<u64> {
        match self {
            UfgError::Ingest { line, .. } => Some(*line),
            _ => None,
        }
    }

    pub(crate) fn ingest(path: &str, line: u64, message: impl Into<String>) -> Self {
        UfgError::Ingest {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for UfgError {
    fn from(e: std::io::Error) -> Self {
        UfgError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, UfgError>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(UfgError::Input(msg.into()))
}
