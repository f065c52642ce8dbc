use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Failure of a CLI run, classified by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input files. Exit status 1.
    Usage(String),
    /// Numerical, search or output failure. Exit status 2.
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        CliError::Failure(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Failure(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Failure(_) => ExitCode::from(2),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<optsample_core::Error> for CliError {
    fn from(e: optsample_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
