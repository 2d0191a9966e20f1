//! Command-line front end over the experiment registry.

pub mod config;
pub mod experiments;
pub mod report;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for file errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Internal(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<chronobell::Error> for CliError {
    fn from(e: chronobell::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
