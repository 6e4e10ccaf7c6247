use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain an operation is defined on
    /// (non-finite entries, negative weights, empty vectors, ...).
    #[error("input domain: {0}")]
    InputDomain(String),

    /// A structurally invalid configuration (bad parameter ranges,
    /// solver/model combinations that are not defined).
    #[error("configuration: {0}")]
    Config(String),

    /// An inner solver could not make progress.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// Malformed input file.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// I/O failure with path context.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An operation would exceed a configured resource cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
