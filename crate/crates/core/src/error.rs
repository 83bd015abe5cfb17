//! Error type shared by every module, tagged with a stable category string
//! so the CLI can report failures in a machine-parseable form.

use std::fmt;
use std::path::PathBuf;

/// Toolkit-wide error.
#[derive(Debug)]
pub enum Error {
    /// A precondition on an operation's input was violated.
    InvalidInput(String),
    /// Input is structurally valid but numerically degenerate
    /// (all-zero frame, zero minimum in a ratio, ...).
    DegenerateInput(String),
    /// Filesystem failure, carrying the offending path.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// An on-disk artifact did not parse or failed an integrity check.
    Format(String),
    /// A configuration document was rejected.
    Config(String),
    /// Model and pipeline disagree on version, feature mode, or geometry.
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable category slug used as the first token of CLI error lines.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::Io { .. } => "io",
            Error::Format(_) => "format",
            Error::Config(_) => "config",
            Error::Incompatible(_) => "incompatible",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m)
            | Error::DegenerateInput(m)
            | Error::Format(m)
            | Error::Config(m)
            | Error::Incompatible(m) => write!(f, "{}: {}", self.category(), m),
            Error::Io { path, source } => {
                write!(f, "io: {}: {}", path.display(), source)
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
