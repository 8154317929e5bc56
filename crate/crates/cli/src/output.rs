//! Per-frame CSV files and human-readable summaries.

use std::fmt::Write as _;

use beamtrain::real::{linear_to_db, watts_to_dbm};
use beamtrain::sim::{steady_window, summarize, Summary, Violations};
use beamtrain::MetricRecord64;

pub const CSV_HEADER: &str =
    "frame,t_sec,scheme,n_beams,latency_s,snr_db,rate_bps,avg_power_w,ee_bit_per_joule,accuracy,beam_i,beam_j";

/// One CSV line per frame in SI units; `{}` formatting is locale-free and
/// round-trips every `f64` exactly.
pub fn frames_csv(records: &[MetricRecord64]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.frame,
            r.t_sec,
            r.scheme,
            r.n_beams,
            r.latency,
            r.snr_db(),
            r.rate,
            r.avg_power,
            r.ee,
            r.accuracy,
            r.beam.0,
            r.beam.1
        );
    }
    out
}

/// Steady-state means of a run.
pub fn steady_summary(records: &[MetricRecord64], fraction: f64) -> Summary<f64> {
    summarize(steady_window(records, fraction))
}

fn dbm(w: f64) -> f64 {
    if w > 0.0 {
        watts_to_dbm(w)
    } else {
        f64::NEG_INFINITY
    }
}

/// The summary block printed after a run.
pub fn summary_text(s: &Summary<f64>, fraction: f64, violations: &Violations) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "steady state: last {} frames ({:.0}%)", s.frames, fraction * 100.0);
    let _ = writeln!(out, "  beams trained     {:.1}", s.n_beams);
    let _ = writeln!(out, "  latency           {:.4} ms", s.latency * 1e3);
    let _ = writeln!(out, "  snr               {:.2} dB", s.snr_db);
    let _ = writeln!(out, "  rate              {:.4} Gbit/s", s.rate / 1e9);
    let _ = writeln!(out, "  avg power         {:.2} dBm", dbm(s.avg_power));
    let _ = writeln!(out, "  training power    {:.2} dBm", dbm(s.training_power));
    let _ = writeln!(out, "  energy efficiency {:.4e} bit/J", s.ee);
    let _ = writeln!(out, "  accuracy          {:.3}", s.accuracy);
    let v = violations;
    let _ = writeln!(
        out,
        "violations: c1 {} c1.1 {} c3 {} c4 {} c5 {}; truncations {} fallbacks {} normalizations {}",
        v.c1, v.c1_1, v.c3, v.c4, v.c5, v.truncations, v.fallbacks, v.normalizations
    );
    out
}

/// Mean and standard error of the mean; zero error for a single sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// dB of a positive ratio, `-inf` otherwise.
pub fn db(x: f64) -> f64 {
    if x > 0.0 {
        linear_to_db(x)
    } else {
        f64::NEG_INFINITY
    }
}

pub fn power_dbm(w: f64) -> f64 {
    dbm(w)
}
