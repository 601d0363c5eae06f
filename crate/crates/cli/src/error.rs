use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] attenuant_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 1 for a falsified claim or failed cross-check, 2 for everything operational.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(attenuant_core::Error::Falsified(_) | attenuant_core::Error::Consistency(_)) => 1,
            _ => 2,
        }
    }
}
