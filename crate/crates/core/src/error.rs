use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument is outside its documented range.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// Configuration document rejected; `key` is the dotted path of the offending entry.
    #[error("config `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("msh line {line}: {reason}")]
    Msh { line: usize, reason: String },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("partition: {0}")]
    Partition(String),

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("solver: {reason} (iterations {iterations}, relative residual {residual:.3e})")]
    Solve {
        reason: String,
        iterations: usize,
        residual: f64,
    },

    #[error("lumped model: {0}")]
    Lumped(String),

    /// Malformed report / reduced-model document.
    #[error("{what}: {reason}")]
    Document { what: &'static str, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
