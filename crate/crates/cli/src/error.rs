use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] lrbec::Error),
}

impl CliError {
    /// 2 for states the physics does not admit, 1 for everything the caller got wrong.
    pub fn exit_code(&self) -> u8 {
        use lrbec::Error as E;
        match self {
            CliError::Core(E::BranchNotFound(_) | E::NoConvergence { .. } | E::Diverged(_) | E::EnergyMismatch(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
