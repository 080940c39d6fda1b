use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("configuration error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Core(#[from] tubegeom::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownSuite(_) | CliError::ConfigParse(_) | CliError::Io(_) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
