use std::path::PathBuf;

use divrank_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("query {query}: {source}")]
    Query { query: String, source: CoreError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Malformed input is a configuration problem; failures while running
    /// valid input are runtime problems.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Json { .. } => true,
            Error::Core(e) | Error::Query { source: e, .. } => {
                matches!(
                    e,
                    CoreError::Config(_) | CoreError::Parse { .. } | CoreError::Dimension { .. }
                )
            }
            Error::Io { .. } => false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.is_config() {
            EXIT_CONFIG
        } else {
            EXIT_RUNTIME
        }
    }
}
