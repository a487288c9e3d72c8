use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A circuit referenced a parameter slot with no bound value.
    #[error("unbound parameter slot {slot} (only {bound} values bound)")]
    Binding { slot: usize, bound: usize },

    /// A binary or text input file did not match its declared format.
    #[error("format error in {path} at byte offset {offset}: {message}")]
    Format { path: String, offset: u64, message: String },

    /// An iterative numerical routine failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("missing input {path}: {hint}")]
    MissingInput { path: PathBuf, hint: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
