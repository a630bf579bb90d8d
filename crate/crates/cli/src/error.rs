use std::path::Path;

use thiserror::Error;

/// Exit status for a benchmark assertion failure.
pub const EXIT_BENCHMARK: u8 = 1;
/// Exit status for a numerical failure.
pub const EXIT_NUMERICAL: u8 = 2;
/// Exit status for degenerate or invalid input.
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] iumps_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("configuration: {0}")]
    Config(String),
    #[error("benchmark failed: {0}")]
    Benchmark(String),
    #[error("every ensemble instance failed")]
    AllFailed,
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(iumps_core::Error::BenchmarkFailed { .. }) | CliError::Benchmark(_) => EXIT_BENCHMARK,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::AllFailed => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}
