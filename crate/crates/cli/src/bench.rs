//! Side-by-side comparison of every scheme under one scenario.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use beamtrain::{run_sim, FeedbackModel, Scheme};

use crate::config::{ConfigLayers, Origin};
use crate::output::{mean_stderr, power_dbm, steady_summary};
use crate::{pool, write_file, CliError, Written};

/// One scheme's seed-averaged steady-state figures.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scheme: Scheme,
    pub feedback: FeedbackModel,
    pub latency_ms: f64,
    pub snr_db: f64,
    pub rate_gbps: f64,
    pub power_dbm: f64,
    pub ee_bit_per_joule: f64,
}

pub const BENCH_HEADER: &str = "scheme,feedback,latency_ms,snr_db,rate_gbps,power_dbm,ee_bit_per_joule";

pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub table: String,
    pub written: Written,
}

/// Runs all six schemes over `seeds` consecutive seeds and writes
/// `bench.csv`. Every figure is a mean over seeds of steady-state means;
/// power is the dBm value of the mean averaged power.
pub fn cmd_bench(base: &ConfigLayers, seeds: usize, out: &Path, workers: usize) -> Result<BenchReport, CliError> {
    if seeds == 0 {
        return Err(CliError::Usage("bench needs at least one seed".into()));
    }
    let base_seed: u64 = base.get("seed").expect("registered key").parse().expect("canonical seed");
    let mut configs = Vec::new();
    for scheme in Scheme::ALL {
        let mut layers = base.clone();
        layers.set("scheme", scheme.as_str(), Origin::Override("bench".into()))?;
        for k in 0..seeds as u64 {
            layers.set("seed", &base_seed.wrapping_add(k).to_string(), Origin::Override("bench".into()))?;
            configs.push((scheme, layers.resolve()?));
        }
    }
    let per_run: Vec<Result<[f64; 5], CliError>> = pool(workers)?.install(|| {
        configs
            .par_iter()
            .map(|(_, c)| {
                let r = run_sim(c.sim.clone()).map_err(|e| CliError::Runtime(e.to_string()))?;
                let s = steady_summary(&r.records, c.steady_fraction);
                Ok([s.latency, s.snr_db, s.rate, s.avg_power, s.ee])
            })
            .collect()
    });
    let per_run: Vec<[f64; 5]> = per_run.into_iter().collect::<Result<_, _>>()?;

    let rows: Vec<BenchRow> = Scheme::ALL
        .iter()
        .zip(per_run.chunks(seeds))
        .map(|(&scheme, runs)| {
            let mean = |k: usize| mean_stderr(&runs.iter().map(|r| r[k]).collect::<Vec<_>>()).0;
            let (latency, snr_db, rate, power, ee) = (mean(0), mean(1), mean(2), mean(3), mean(4));
            BenchRow {
                scheme,
                feedback: scheme.feedback(),
                latency_ms: latency * 1e3,
                snr_db,
                rate_gbps: rate / 1e9,
                power_dbm: power_dbm(power),
                ee_bit_per_joule: ee,
            }
        })
        .collect();

    let path = out.join("bench.csv");
    write_file(&path, &bench_csv(&rows))?;
    Ok(BenchReport { table: bench_table(&rows), rows, written: vec![path] })
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scheme,
            r.feedback.as_str(),
            r.latency_ms,
            r.snr_db,
            r.rate_gbps,
            r.power_dbm,
            r.ee_bit_per_joule
        );
    }
    out
}

/// Fixed-width table for the terminal.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<11} {:<9} {:>12} {:>9} {:>11} {:>10} {:>14}\n",
        "scheme", "feedback", "latency(ms)", "snr(dB)", "rate(Gb/s)", "power(dBm)", "EE(bit/J)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<11} {:<9} {:>12.4} {:>9.2} {:>11.4} {:>10.2} {:>14.4e}",
            r.scheme.as_str(),
            r.feedback.as_str(),
            r.latency_ms,
            r.snr_db,
            r.rate_gbps,
            r.power_dbm,
            r.ee_bit_per_joule
        );
    }
    out
}
