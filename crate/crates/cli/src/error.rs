use std::path::PathBuf;

use thiserror::Error;

use so3_synergy::sim::SimError;
use so3_synergy::FamilyError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const CERTIFICATION: i32 = 2;
    pub const NON_FINITE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("certification failed: smallest refined gap {min_gap} does not exceed the hysteresis level")]
    CertificationFailed { min_gap: f64 },
    #[error("run `{run}`: non-finite state at t = {t}")]
    NonFinite { run: String, t: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::CertificationFailed { .. } => exit::CERTIFICATION,
            CliError::NonFinite { .. } => exit::NON_FINITE,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub(crate) fn from_sim(run: &str, e: SimError) -> Self {
        match e {
            SimError::NonFinite { t } => CliError::NonFinite { run: run.to_string(), t },
            other => CliError::Config(format!("run `{run}`: {other}")),
        }
    }
}
