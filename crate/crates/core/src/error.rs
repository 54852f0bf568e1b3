use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input outside the domain of an operation (bad node id, coverage mismatch, empty set).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller broke a documented precondition (disconnected min-cut input and similar).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Block edge counts cannot be realised by a simple graph.
    #[error("infeasible partition: {0}")]
    Infeasible(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
