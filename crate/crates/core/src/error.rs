use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator recurrence state is zero")]
    ZeroState,

    #[error("status index {0} outside [0, 624]")]
    InvalidIndex(usize),

    #[error("malformed status file: {0}")]
    Format(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("test {id}: {source}")]
    Test {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem or malformed input files.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Json { .. } | Error::Format(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
