use thiserror::Error;

/// Failure classes that map onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Usage(_) | CliError::Failure(_) => 1,
        }
    }
}

impl From<realbeam::Error> for CliError {
    fn from(e: realbeam::Error) -> Self {
        match e {
            realbeam::Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            realbeam::Error::Domain(_)
            | realbeam::Error::InvalidModel(_)
            | realbeam::Error::InvalidLayout(_)
            | realbeam::Error::GridTooCoarse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
