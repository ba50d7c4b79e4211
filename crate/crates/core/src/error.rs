use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a mathematical function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// One entry per violated parameter field.
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    /// A closed form produced a probability clearly outside [0, 1].
    #[error("numerical consistency violated: {0}")]
    Consistency(String),

    #[error("config error in {path}: {msg}")]
    Config { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
