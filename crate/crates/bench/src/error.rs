use std::path::PathBuf;

use thiserror::Error;

/// Failures of the bench front end, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ro_arena::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
}

impl BenchError {
    pub fn usage(msg: impl Into<String>) -> Self {
        BenchError::Usage(msg.into())
    }

    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        BenchError::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for usage errors, 4 for solver failures, 3 for everything else
    /// (bad instances, contract violations, unreadable files).
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 2,
            BenchError::Core(ro_arena::Error::Solver { .. }) => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
