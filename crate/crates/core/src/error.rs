use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the scan, triage, or evaluation path.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid detector or pipeline configuration. Raised before any scanning.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown locale tag `{0}`")]
    UnknownLocale(String),

    /// A caller broke a documented precondition (bad span, overlapping input).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{path}:{line}: {message}")]
    Load {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// All problems found while validating a policy template, in file order.
    #[error("invalid policy template: {}", .0.join("; "))]
    TemplateValidation(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Converts a TOML parse error into a `Load` error carrying a 1-based line.
pub(crate) fn toml_load_error(source: &str, content: &str, e: &toml::de::Error) -> Error {
    Error::Load {
        path: source.into(),
        line: e
            .span()
            .map(|s| content[..s.start.min(content.len())].matches('\n').count() + 1)
            .unwrap_or(0),
        message: e.message().to_owned(),
    }
}
