use std::path::Path;

/// Failure of a subcommand. Parameter errors exit with status 2, everything
/// else with status 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parameter(String),
    #[error(transparent)]
    Core(#[from] coverenc::Error),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parameter(_) => 2,
            CliError::Core(e) if e.is_parameter_error() => 2,
            _ => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn input(path: &Path, message: impl ToString) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("writing CSV: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
