use std::fmt;
use std::process::ExitCode;

/// A failure with its process exit status: configuration and input problems
/// exit with 2, failures while running exit with 1.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        CliError::Config(anyhow::anyhow!("{msg}"))
    }

    pub fn runtime(msg: impl fmt::Display) -> Self {
        CliError::Runtime(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) | CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

/// Library errors come from inconsistent inputs or parameters.
impl From<chunkstyle::Error> for CliError {
    fn from(e: chunkstyle::Error) -> Self {
        CliError::Config(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
