use std::path::Path;

/// Failure classes with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("computation error: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// Classifies a core error raised while handling `context`.
    pub fn core(context: &str, err: fracdyn_core::Error) -> Self {
        use fracdyn_core::Error as E;
        let msg = format!("{context}: {err}");
        match err {
            E::Validation(_) | E::Domain(_) | E::Usage(_) => CliError::Validation(msg),
            _ => CliError::Compute(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
