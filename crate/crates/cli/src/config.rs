use std::path::PathBuf;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines a run's output, echoed into every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub cutoff: Option<usize>,
    pub resolution: usize,
    pub eps: f64,
    pub n_max: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.resolution < 2 {
            return Err(CliError::Config(format!("resolution must be >= 2, got {}", self.resolution)));
        }
        if self.n_max < 2 {
            return Err(CliError::Config(format!("n_max must be >= 2, got {}", self.n_max)));
        }
        if self.threads == 0 {
            return Err(CliError::Config("thread count must be >= 1".into()));
        }
        Ok(())
    }
}

/// `--threads`, then `ATTENUANT_THREADS`, then the core count.
pub fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("ATTENUANT_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("ATTENUANT_THREADS is not a count: {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}
