use std::str::FromStr;

use super::{AxisHistory, BeamPolicy, Direction};
use crate::error::{invalid, Error, Result};
use crate::phys::{Axis, BeamCodebook};
use crate::real::Real;

/// Which history entry becomes the search center once the failure scan
/// stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterRule {
    /// The most recent successful record (span size after the last
    /// increment).
    #[default]
    FirstSuccess,
    /// One record newer than the first success, i.e. the span size before
    /// its last increment (clamped to the newest record).
    PreIncrement,
}

impl CenterRule {
    pub fn as_str(self) -> &'static str {
        match self {
            CenterRule::FirstSuccess => "first_success",
            CenterRule::PreIncrement => "pre_increment",
        }
    }
}

impl FromStr for CenterRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first_success" => Ok(Self::FirstSuccess),
            "pre_increment" => Ok(Self::PreIncrement),
            other => Err(invalid("select.center_rule", format!("unknown rule `{other}`"))),
        }
    }
}

/// First-order differences of the optimal indexes, `x[k+1] - x[k]` in
/// chronological order, so a positive entry means the beam moved to a
/// higher index.
pub fn axis_diffs<T: Real>(hist: &AxisHistory<T>) -> Result<Vec<i64>> {
    if hist.len() < 2 {
        return Err(Error::InsufficientHistory);
    }
    Ok(hist.optimal_indexes.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect())
}

/// Search center, span size and width learned from one axis history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanParams {
    pub center: usize,
    pub span_size: usize,
    pub width: usize,
}

/// Scans the history newest-first; every failed record (`snr <= gamma_th`)
/// widens the span, the first success fixes the center and width.
pub fn span_params<T: Real>(hist: &AxisHistory<T>, gamma_th: T, rule: CenterRule) -> Result<SpanParams> {
    if hist.is_empty() {
        return Err(Error::InsufficientHistory);
    }
    let max_step =
        axis_diffs(hist).map(|d| d.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)).unwrap_or(0);
    let n = hist.len();
    let mut span_size = 1;
    for tau in 1..=n {
        if hist.snrs[n - tau] <= gamma_th {
            span_size += 1;
            continue;
        }
        let lag = match rule {
            CenterRule::FirstSuccess => span_size,
            CenterRule::PreIncrement => (span_size - 1).max(1),
        };
        return Ok(SpanParams { center: hist.optimal_indexes[n - lag], span_size, width: span_size * max_step });
    }
    Err(Error::AllFailed)
}

/// Contiguous index set around `center`, oriented by the signs of the
/// differences and clamped to the axis.
pub fn directional_set(center: usize, width: usize, diffs: &[i64], axis_len: usize) -> (Vec<usize>, Direction) {
    let direction = if diffs.iter().all(|&d| d >= 0) {
        Direction::Forward
    } else if diffs.iter().all(|&d| d < 0) {
        Direction::Backward
    } else {
        Direction::Bidirectional
    };
    if axis_len == 0 {
        return (Vec::new(), direction);
    }
    let last = axis_len - 1;
    let center = center.min(last);
    let (lo, hi) = match direction {
        Direction::Forward => (center, center.saturating_add(width)),
        Direction::Backward => (center.saturating_sub(width), center),
        _ => (center.saturating_sub(width), center.saturating_add(width)),
    };
    ((lo..=hi.min(last)).collect(), direction)
}

fn axis_set<T: Real>(
    hist: &AxisHistory<T>,
    len: usize,
    gamma_th: T,
    rule: CenterRule,
) -> Result<(Vec<usize>, Direction)> {
    let diffs = axis_diffs(hist)?;
    let params = span_params(hist, gamma_th, rule)?;
    Ok(directional_set(params.center, params.width, &diffs, len))
}

/// History-driven 3D policy: each axis learns its own directional index
/// set and the policy is their cartesian span.
pub fn eetbf_bt<T: Real>(
    h_hist: &AxisHistory<T>,
    v_hist: &AxisHistory<T>,
    codebook: &BeamCodebook<T>,
    gamma_th: T,
    rule: CenterRule,
) -> Result<BeamPolicy> {
    let (h, hd) = axis_set(h_hist, codebook.axis_len(Axis::Horizontal), gamma_th, rule)?;
    let (v, vd) = axis_set(v_hist, codebook.axis_len(Axis::Vertical), gamma_th, rule)?;
    Ok(BeamPolicy::span(h, hd, v, vd))
}
