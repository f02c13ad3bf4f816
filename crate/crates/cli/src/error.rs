use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Check(_) => 3,
            CliError::NotFound(_) => 4,
            CliError::Resource(_) => 5,
        }
    }
}
