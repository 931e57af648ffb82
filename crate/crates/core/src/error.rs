use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    ParseAt { offset: usize, message: String },

    #[error("parse error at line {line}: {message}")]
    ParseLine { line: usize, message: String },

    #[error("duplicate document id {0:?}")]
    DuplicateDocno(String),

    #[error("duplicate identifier {0:?}")]
    Duplicate(String),

    #[error("unknown tag {tag:?} at line {line} has no collapse mapping")]
    UnknownTag { tag: String, line: usize },

    #[error("unsupported format version {found} (this build reads version {supported})")]
    Version { found: u32, supported: u32 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("{}: not found", .0.display())]
    NotFound(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for errors caused by the caller's configuration rather than by input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
