//! Brute-force transcriptions used as references for the optimized code.
//! Each one is written from the definition, not from the implementation.

use beamtrain::error::Error;
use beamtrain::select::{BeamPolicy, ChannelEstimate, Sector};
use beamtrain::BeamIndex;
use rand::Rng;

/// Largest SNR; among equal maxima the lexicographically smallest beam.
pub fn pick_optimal(grid: &[(BeamIndex, f64)]) -> Option<(BeamIndex, f64)> {
    let top = grid.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    grid.iter().filter(|g| g.1 == top).map(|g| g.0).min().map(|b| (b, top))
}

pub fn axis_diffs(x: &[usize]) -> Option<Vec<i64>> {
    if x.len() < 2 {
        return None;
    }
    let mut d = Vec::new();
    for k in 1..x.len() {
        d.push(x[k] as i64 - x[k - 1] as i64);
    }
    Some(d)
}

#[derive(Debug, PartialEq)]
pub enum AxisOutcome {
    Set(Vec<usize>),
    TooShort,
    AllFailed,
}

/// One axis of the directional policy by membership testing over the
/// whole axis.
pub fn axis_set(idx: &[usize], snr: &[f64], gamma_th: f64, len: usize) -> AxisOutcome {
    let Some(d) = axis_diffs(idx) else {
        return AxisOutcome::TooShort;
    };
    // most recent success and the failures recorded after it
    let Some(r) = (0..idx.len()).rev().find(|&k| snr[k] > gamma_th) else {
        return AxisOutcome::AllFailed;
    };
    let span_size = idx.len() - r;
    let center = idx[r].min(len - 1) as i64;
    let width = (span_size as i64) * d.iter().map(|x| x.abs()).max().unwrap_or(0);
    let (lo, hi) = if d.iter().all(|&x| x >= 0) {
        (center, center + width)
    } else if d.iter().all(|&x| x < 0) {
        (center - width, center)
    } else {
        (center - width, center + width)
    };
    AxisOutcome::Set((0..len).filter(|&k| (k as i64) >= lo && (k as i64) <= hi).collect())
}

/// Every codebook beam whose two axis indexes are both selected.
pub fn eetbf_beams(h: &[usize], v: &[usize], n_h: usize, n_v: usize) -> Vec<BeamIndex> {
    let mut out = Vec::new();
    for i in 0..n_h {
        for j in 0..n_v {
            if h.contains(&i) && v.contains(&j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Repeated selection of the strongest remaining decodable beam.
#[allow(clippy::too_many_arguments)]
pub fn init_top_beams(
    est: &ChannelEstimate<f64>,
    n_v: usize,
    n_be: usize,
    power_cap: f64,
    gamma_th: f64,
    gamma_dec: f64,
    noise: f64,
    gains: &[f64],
) -> Result<Vec<BeamIndex>, Error> {
    let mut pool: Vec<usize> = (0..est.gains.len())
        .filter(|&k| est.valid[k] && power_cap * est.gains[k] * gains[k] >= gamma_dec * noise)
        .collect();
    let mut picked = Vec::new();
    while picked.len() < n_be && !pool.is_empty() {
        let mut best = 0;
        for p in 1..pool.len() {
            let (a, b) = (pool[p], pool[best]);
            let (sa, sb) = (est.gains[a] * gains[a], est.gains[b] * gains[b]);
            if sa > sb || (sa == sb && a < b) {
                best = p;
            }
        }
        picked.push(pool.remove(best));
    }
    if !picked.iter().any(|&k| power_cap * est.gains[k] * gains[k] >= gamma_th * noise) {
        return Err(Error::Infeasible);
    }
    Ok(picked.into_iter().map(|k| (k / n_v, k % n_v)).collect())
}

/// Halving search on `[lo, hi)`, written recursively.
fn bisect(
    lo: usize,
    hi: usize,
    score: &mut dyn FnMut(usize, usize) -> f64,
    probes: &mut Vec<(usize, usize, f64)>,
) -> usize {
    if hi - lo <= 1 {
        return lo;
    }
    let mid = (lo + hi) / 2;
    let left = score(lo, mid);
    let right = score(mid, hi);
    probes.push((lo, mid, left));
    probes.push((mid, hi, right));
    if left >= right {
        bisect(lo, mid, score, probes)
    } else {
        bisect(mid, hi, score, probes)
    }
}

/// Azimuth bisection over full-elevation sectors, then elevation on the
/// chosen column. Returns the beam and the probed sectors in order.
pub fn binary_search(n_h: usize, n_v: usize, score: &dyn Fn(&Sector) -> f64) -> (BeamIndex, Vec<(Sector, f64)>) {
    let mut h_probes = Vec::new();
    let i = bisect(0, n_h, &mut |a, b| score(&Sector { h: a..b, v: 0..n_v }), &mut h_probes);
    let mut v_probes = Vec::new();
    let j = bisect(0, n_v, &mut |a, b| score(&Sector { h: i..i + 1, v: a..b }), &mut v_probes);
    let mut probes: Vec<(Sector, f64)> =
        h_probes.into_iter().map(|(a, b, s)| (Sector { h: a..b, v: 0..n_v }, s)).collect();
    probes.extend(v_probes.into_iter().map(|(a, b, s)| (Sector { h: i..i + 1, v: a..b }, s)));
    ((i, j), probes)
}

/// Sector score: sum of per-beam weights inside the sector.
pub fn sector_score(weights: &[Vec<f64>], s: &Sector) -> f64 {
    s.h.clone().map(|i| s.v.clone().map(|j| weights[i][j]).sum::<f64>()).sum()
}

/// Values drawn from a small set so that ties are common.
pub fn coarse<R: Rng>(rng: &mut R, levels: u32) -> f64 {
    f64::from(rng.random_range(0..levels)) * 0.5
}

pub fn policy_is_contiguous(p: &BeamPolicy) -> bool {
    let run = |xs: &[usize]| xs.windows(2).all(|w| w[1] == w[0] + 1);
    run(&p.h_indexes) && run(&p.v_indexes)
}
