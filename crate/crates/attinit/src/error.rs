use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} runs failed numerically (partial results written)")]
    Numerical { failed: usize, total: usize },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Process exit code: 1 config, 2 I/O, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 1,
            AppError::Io { .. } => 2,
            AppError::Numerical { .. } => 3,
        }
    }
}

impl From<attinit_core::Error> for AppError {
    fn from(e: attinit_core::Error) -> Self {
        AppError::Config(e.to_string())
    }
}
