use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: sbmconn_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] sbmconn_core::Error),
}

impl CliError {
    pub fn input(path: impl Into<PathBuf>, source: sbmconn_core::Error) -> Self {
        match source {
            // already carries its path
            sbmconn_core::Error::Io { .. } => CliError::Core(source),
            source => CliError::Input {
                path: path.into(),
                source,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        use sbmconn_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Input { source, .. } | CliError::Core(source) => match source {
                E::Io { .. } | E::Parse { .. } => 2,
                _ => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
