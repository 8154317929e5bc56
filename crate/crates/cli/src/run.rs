//! Single simulation runs.

use std::path::{Path, PathBuf};

use beamtrain::power::QTable;
use beamtrain::{RunResult64, Simulator64};

use crate::output::{frames_csv, steady_summary, summary_text};
use crate::{write_file, CliError, Resolved, Written};

pub struct RunOptions<'a> {
    pub out: &'a Path,
    /// Start from a saved Q-table.
    pub q_in: Option<&'a Path>,
    /// Save the final Q-table.
    pub q_out: Option<&'a Path>,
}

pub struct RunReport {
    pub result: RunResult64,
    pub summary: String,
    pub written: Written,
}

/// Runs one configuration and writes `frames.csv`, `summary.txt` and the
/// resolved `config.txt` into the output directory.
pub fn cmd_run(config: &Resolved, opts: &RunOptions) -> Result<RunReport, CliError> {
    let mut sim = Simulator64::new(config.sim.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(path) = opts.q_in {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let table = QTable::load(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        sim = sim.with_q_table(table).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    let result = sim.run();
    let summary = summary_text(
        &steady_summary(&result.records, config.steady_fraction),
        config.steady_fraction,
        &result.violations,
    );

    let mut written: Vec<PathBuf> = Vec::new();
    let mut emit = |path: PathBuf, text: &str| -> Result<(), CliError> {
        write_file(&path, text)?;
        written.push(path);
        Ok(())
    };
    emit(opts.out.join("config.txt"), &config.echo)?;
    emit(opts.out.join("frames.csv"), &frames_csv(&result.records))?;
    emit(opts.out.join("summary.txt"), &summary)?;
    if let Some(path) = opts.q_out {
        emit(path.to_path_buf(), &result.q_table.dump())?;
    }
    Ok(RunReport { result, summary, written })
}
