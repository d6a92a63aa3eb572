use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A reference to a neuron, synapse or population that does not exist,
    /// or a topology that violates a builder invariant.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Invalid configuration. `path` is the dotted location inside the
    /// config document (empty when the whole document is at fault).
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("malformed event record at {location}: {message}")]
    MalformedRecord { location: String, message: String },

    #[error("trained state does not match network (expected hash {expected}, found {found})")]
    NetworkMismatch { expected: String, found: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
