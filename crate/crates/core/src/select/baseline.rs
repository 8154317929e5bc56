use std::ops::Range;

use rand::seq::index;
use rand::Rng;

use super::{BeamPolicy, Direction};
use crate::metrics::BeamIndex;
use crate::phys::BeamCodebook;
use crate::real::Real;

/// The whole codebook in row-major order.
pub fn exhaustive_policy<T: Real>(codebook: &BeamCodebook<T>) -> BeamPolicy {
    let h = (0..codebook.n_h()).collect();
    let v = (0..codebook.n_v()).collect();
    BeamPolicy::span(h, Direction::Exhaustive, v, Direction::Exhaustive)
}

/// `n` distinct beams drawn uniformly without replacement, row-major.
pub fn random_policy<T: Real, R: Rng + ?Sized>(codebook: &BeamCodebook<T>, n: usize, rng: &mut R) -> BeamPolicy {
    let total = codebook.len();
    let mut picks = index::sample(rng, total, n.min(total)).into_vec();
    picks.sort_unstable();
    BeamPolicy::explicit(picks.into_iter().map(|k| codebook.unflat(k)).collect(), Direction::Other)
}

fn window(center: usize, width: usize, len: usize) -> Vec<usize> {
    let width = width.clamp(1, len);
    let lo = center.saturating_sub(width / 2).min(len - width);
    (lo..lo + width).collect()
}

/// A fixed window of `width` consecutive beams per axis around the previous
/// optimum, shifted inward at the codebook edges.
pub fn linear_policy<T: Real>(codebook: &BeamCodebook<T>, previous: BeamIndex, width: usize) -> BeamPolicy {
    let h = window(previous.0.min(codebook.n_h() - 1), width, codebook.n_h());
    let v = window(previous.1.min(codebook.n_v() - 1), width, codebook.n_v());
    BeamPolicy::span(h, Direction::Bidirectional, v, Direction::Bidirectional)
}

/// A rectangular block of codebook beams, trained as one widened beam.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub h: Range<usize>,
    pub v: Range<usize>,
}

impl Sector {
    pub fn beam(i: usize, j: usize) -> Self {
        Self { h: i..i + 1, v: j..j + 1 }
    }

    pub fn is_single(&self) -> bool {
        self.h.len() == 1 && self.v.len() == 1
    }
}

/// Probes issued by an interactive search and the beam it settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub probes: Vec<(Sector, T)>,
    /// Feedback rounds (levels or bisection steps).
    pub rounds: usize,
    pub best: BeamIndex,
    /// SNR measured on the final single beam.
    pub best_snr: T,
}

fn split(range: &Range<usize>, parts: usize) -> Vec<Range<usize>> {
    let len = range.len();
    let parts = parts.min(len).max(1);
    (0..parts)
        .map(|p| range.start + p * len / parts..range.start + (p + 1) * len / parts)
        .filter(|r| !r.is_empty())
        .collect()
}

fn argmax_first<T: Real>(scores: &[(Sector, T)]) -> usize {
    let mut best = 0;
    for (k, s) in scores.iter().enumerate().skip(1) {
        if s.1 > scores[best].1 {
            best = k;
        }
    }
    best
}

/// Tree search from the widest sectors down: every level splits the
/// current region into up to `branching` sub-sectors (`sqrt(branching)`
/// per axis), trains each once and descends into the strongest.
pub fn iterative_search<T: Real>(
    n_h: usize,
    n_v: usize,
    branching: usize,
    mut measure: impl FnMut(&Sector) -> T,
) -> SearchOutcome<T> {
    let per_axis = ((branching as f64).sqrt().round() as usize).max(2);
    let mut region = Sector { h: 0..n_h, v: 0..n_v };
    let mut probes = Vec::new();
    let mut rounds = 0;
    let mut last: Option<T> = None;
    while !region.is_single() {
        let level: Vec<(Sector, T)> = split(&region.h, per_axis)
            .into_iter()
            .flat_map(|h| split(&region.v, per_axis).into_iter().map(move |v| Sector { h: h.clone(), v }))
            .map(|s| {
                let g = measure(&s);
                (s, g)
            })
            .collect();
        let win = argmax_first(&level);
        region = level[win].0.clone();
        last = Some(level[win].1);
        probes.extend(level);
        rounds += 1;
    }
    let best_snr = match last {
        Some(g) => g,
        None => {
            let g = measure(&region);
            probes.push((region.clone(), g));
            g
        }
    };
    SearchOutcome { probes, rounds, best: (region.h.start, region.v.start), best_snr }
}

/// Bisection over `[0, len)`: each round trains both halves and keeps the
/// stronger (the lower half on ties). Returns the final index, the number
/// of rounds and the probes `(range, score)`.
pub fn bisect_axis<T: Real>(
    len: usize,
    mut measure: impl FnMut(Range<usize>) -> T,
) -> (usize, usize, Vec<(Range<usize>, T)>) {
    let (mut lo, mut hi) = (0, len);
    let mut probes = Vec::new();
    let mut rounds = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let left = measure(lo..mid);
        let right = measure(mid..hi);
        probes.push((lo..mid, left));
        probes.push((mid..hi, right));
        if right > left {
            lo = mid;
        } else {
            hi = mid;
        }
        rounds += 1;
    }
    (lo, rounds, probes)
}

/// Per-axis bisection: azimuth first with a sector spanning every elevation,
/// then elevation on the chosen azimuth beam.
pub fn binary_search<T: Real>(n_h: usize, n_v: usize, mut measure: impl FnMut(&Sector) -> T) -> SearchOutcome<T> {
    let mut probes = Vec::new();
    let (i, h_rounds, h_probes) = bisect_axis(n_h, |r| measure(&Sector { h: r, v: 0..n_v }));
    probes.extend(h_probes.into_iter().map(|(r, g)| (Sector { h: r, v: 0..n_v }, g)));
    let (j, v_rounds, v_probes) = bisect_axis(n_v, |r| measure(&Sector { h: i..i + 1, v: r }));
    probes.extend(v_probes.into_iter().map(|(r, g)| (Sector { h: i..i + 1, v: r }, g)));
    let final_beam = Sector::beam(i, j);
    let best_snr = match probes.iter().rev().find(|(s, _)| *s == final_beam) {
        Some(&(_, g)) => g,
        None => {
            let g = measure(&final_beam);
            probes.push((final_beam, g));
            g
        }
    };
    SearchOutcome { probes, rounds: h_rounds + v_rounds, best: (i, j), best_snr }
}
