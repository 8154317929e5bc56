//! Parameter sweeps: every (value, scheme, seed) point runs independently
//! on the worker pool, then a single reduce step aggregates over seeds.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use beamtrain::{run_sim, Scheme};

use crate::config::{ConfigLayers, Origin};
use crate::output::{frames_csv, mean_stderr, steady_summary};
use crate::plot::{line_chart, Series};
use crate::{pool, write_file, CliError, Resolved, Written};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Velocity,
    TTi,
    NBeams,
    Freq,
    Radius,
    Scheme,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Velocity => "velocity",
            SweepParam::TTi => "t_ti",
            SweepParam::NBeams => "n_beams",
            SweepParam::Freq => "freq",
            SweepParam::Radius => "radius",
            SweepParam::Scheme => "scheme",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            SweepParam::Velocity => "user speed (km/h)",
            SweepParam::TTi => "transmission interval (s)",
            SweepParam::NBeams => "codebook size (beams)",
            SweepParam::Freq => "carrier frequency (Hz)",
            SweepParam::Radius => "serving radius (m)",
            SweepParam::Scheme => "scheme",
        }
    }

    /// Config assignments for one sweep value.
    fn assignments(self, value: &str) -> Result<Vec<(&'static str, String)>, CliError> {
        Ok(match self {
            SweepParam::Velocity => vec![("user.speed_kmh", value.into())],
            SweepParam::TTi => vec![("frame.t_ti_s", value.into())],
            SweepParam::Freq => vec![("channel.freq_hz", value.into())],
            SweepParam::Radius => vec![("geometry.radius_m", value.into())],
            SweepParam::Scheme => vec![("scheme", value.into())],
            SweepParam::NBeams => {
                let n: usize =
                    value.parse().map_err(|_| CliError::Usage(format!("n_beams value `{value}` is not an integer")))?;
                let side = (n as f64).sqrt().round() as usize;
                if side == 0 || side * side != n {
                    return Err(CliError::Usage(format!("n_beams value {n} is not a perfect square")));
                }
                vec![("codebook.n_h", side.to_string()), ("codebook.n_v", side.to_string())]
            }
        })
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        [
            SweepParam::Velocity,
            SweepParam::TTi,
            SweepParam::NBeams,
            SweepParam::Freq,
            SweepParam::Radius,
            SweepParam::Scheme,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| CliError::Usage(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<String>,
    /// Ignored when sweeping the scheme itself.
    pub schemes: Vec<Scheme>,
    pub seeds: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::Usage("sweep needs at least one value".into()));
        }
        if self.seeds == 0 {
            return Err(CliError::Usage("sweep needs at least one seed".into()));
        }
        if self.param != SweepParam::Scheme && self.schemes.is_empty() {
            return Err(CliError::Usage("sweep needs at least one scheme".into()));
        }
        Ok(())
    }
}

/// Steady-state metrics recoverable from the per-frame CSV.
pub const METRICS: [&str; 7] =
    ["n_beams", "latency_s", "snr_db", "rate_bps", "avg_power_w", "ee_bit_per_joule", "accuracy"];

/// One aggregated (value, scheme) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub scheme: Scheme,
    pub seeds: usize,
    /// `(mean, stderr)` per entry of [`METRICS`].
    pub stats: Vec<(f64, f64)>,
}

struct Job {
    value_index: usize,
    scheme: Scheme,
    seed: u64,
    config: Resolved,
}

fn plan(base: &ConfigLayers, spec: &SweepSpec) -> Result<Vec<Job>, CliError> {
    spec.validate()?;
    let base_seed: u64 = base.get("seed").expect("registered key").parse().expect("canonical seed");
    let mut jobs = Vec::new();
    for (value_index, value) in spec.values.iter().enumerate() {
        let schemes = if spec.param == SweepParam::Scheme {
            vec![value.parse::<Scheme>().map_err(|e| CliError::Usage(e.to_string()))?]
        } else {
            spec.schemes.clone()
        };
        for scheme in schemes {
            let mut layers = base.clone();
            for (key, v) in spec.param.assignments(value)? {
                layers.set(key, &v, Origin::Override(format!("sweep {}={value}", spec.param)))?;
            }
            layers.set("scheme", scheme.as_str(), Origin::Override("sweep".into()))?;
            for k in 0..spec.seeds as u64 {
                let seed = base_seed.wrapping_add(k);
                layers.set("seed", &seed.to_string(), Origin::Override("sweep".into()))?;
                jobs.push(Job { value_index, scheme, seed, config: layers.resolve()? });
            }
        }
    }
    Ok(jobs)
}

/// Per-run CSV location inside a sweep output directory.
pub fn run_csv_path(out: &Path, param: SweepParam, value: &str, scheme: Scheme, seed: u64) -> PathBuf {
    out.join("runs").join(format!("{param}_{value}")).join(format!("{scheme}_seed{seed}.csv"))
}

pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub written: Written,
}

/// Runs the sweep, writing `runs/<param>_<value>/<scheme>_seed<k>.csv`,
/// `sweep.csv` and, with `plot`, one SVG chart per metric.
pub fn cmd_sweep(
    base: &ConfigLayers,
    spec: &SweepSpec,
    out: &Path,
    workers: usize,
    plot: bool,
) -> Result<SweepReport, CliError> {
    let jobs = plan(base, spec)?;
    let steady_fraction = base.resolve()?.steady_fraction;
    let per_run: Vec<Result<Vec<f64>, CliError>> = pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|job| {
                let result = run_sim(job.config.sim.clone()).map_err(|e| CliError::Runtime(e.to_string()))?;
                let path = run_csv_path(out, spec.param, &spec.values[job.value_index], job.scheme, job.seed);
                write_file(&path, &frames_csv(&result.records))?;
                let s = steady_summary(&result.records, steady_fraction);
                Ok(vec![s.n_beams, s.latency, s.snr_db, s.rate, s.avg_power, s.ee, s.accuracy])
            })
            .collect()
    });

    let mut rows: Vec<SweepRow> = Vec::new();
    let mut samples: Vec<Vec<Vec<f64>>> = Vec::new();
    for (job, metrics) in jobs.iter().zip(per_run) {
        let metrics = metrics?;
        let value = &spec.values[job.value_index];
        match rows.last() {
            Some(r) if r.value == *value && r.scheme == job.scheme => {}
            _ => {
                rows.push(SweepRow { value: value.clone(), scheme: job.scheme, seeds: 0, stats: Vec::new() });
                samples.push(vec![Vec::new(); METRICS.len()]);
            }
        }
        let (row, sample) = (rows.last_mut().expect("pushed above"), samples.last_mut().expect("pushed above"));
        row.seeds += 1;
        for (s, m) in sample.iter_mut().zip(metrics) {
            s.push(m);
        }
    }
    for (row, sample) in rows.iter_mut().zip(&samples) {
        row.stats = sample.iter().map(|s| mean_stderr(s)).collect();
    }

    let mut written: Written =
        jobs.iter().map(|j| run_csv_path(out, spec.param, &spec.values[j.value_index], j.scheme, j.seed)).collect();
    let summary = out.join("sweep.csv");
    write_file(&summary, &sweep_csv(spec.param, &rows))?;
    written.push(summary);
    if plot && spec.param != SweepParam::Scheme {
        for path in write_charts(spec.param, &rows, out)? {
            written.push(path);
        }
    }
    Ok(SweepReport { rows, written })
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let mut out = String::from("param,value,scheme,seeds");
    for m in METRICS {
        let _ = write!(out, ",{m}_mean,{m}_stderr");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{param},{},{},{}", r.value, r.scheme, r.seeds);
        for (mean, se) in &r.stats {
            let _ = write!(out, ",{mean},{se}");
        }
        out.push('\n');
    }
    out
}

fn write_charts(param: SweepParam, rows: &[SweepRow], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut schemes: Vec<Scheme> = rows.iter().map(|r| r.scheme).collect();
    schemes.sort();
    schemes.dedup();
    let mut paths = Vec::new();
    for (m, name) in METRICS.iter().enumerate() {
        let series: Vec<Series> = schemes
            .iter()
            .map(|&scheme| Series {
                label: scheme.to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.scheme == scheme)
                    .filter_map(|r| r.value.parse::<f64>().ok().map(|x| (x, r.stats[m].0)))
                    .collect(),
            })
            .collect();
        let path = out.join(format!("sweep_{name}.svg"));
        write_file(&path, &line_chart(&format!("{name} vs {param}"), param.axis_label(), name, &series))?;
        paths.push(path);
    }
    Ok(paths)
}
