//! Experiment harness around the `beamtrain` simulator: configuration
//! loading, single runs, parameter sweeps and the scheme benchmark.

pub mod bench;
pub mod config;
pub mod output;
pub mod plot;
pub mod run;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use config::{load_config, ConfigError, ConfigLayers, Resolved};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A malformed request that never reached the simulator.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Worker pool of `workers` threads; zero picks one per core.
pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))
}

/// Files written by a command, for reporting.
pub type Written = Vec<PathBuf>;
