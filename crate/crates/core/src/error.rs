use std::path::PathBuf;

/// Errors produced by the engine and its file readers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown sensor preset `{0}` (expected one of V64, V32, V16, O64, O128)")]
    UnknownPreset(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("{path}: world cache version {found} is not supported (expected {expected})")]
    CacheVersion {
        path: PathBuf,
        found: u8,
        expected: u8,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by the content of input data rather than by
    /// the way the engine was invoked.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidInput(_) | Error::UnknownPreset(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
