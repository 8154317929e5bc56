use super::{BeamPolicy, Direction};
use crate::error::{invalid, Error, Result};
use crate::metrics::{BeamCapture, FrameBudget};
use crate::real::Real;

/// Channel gain recovered from a measured SNR: `gamma * noise / (P G_h G_v)`.
pub fn estimate_channel<T: Real>(snr: T, power: T, gain_h: T, gain_v: T, noise_power: T) -> Result<T> {
    if !(power > T::zero()) {
        return Err(invalid("power", "must be positive"));
    }
    if !(gain_h > T::zero() && gain_v > T::zero()) {
        return Err(invalid("gain", "beam gains must be positive"));
    }
    Ok(snr * noise_power / (power * gain_h * gain_v))
}

/// Predicted per-beam channel gains, dense in flat beam index.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate<T> {
    pub gains: Vec<T>,
    pub valid: Vec<bool>,
}

impl<T: Real> ChannelEstimate<T> {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// Exponentially decayed average of past estimates. `history[tau - 1][k]`
/// is beam `k`'s estimate `tau` captures ago; zero entries are treated as
/// missing and excluded from the beam's sample count.
pub fn predict_channel<T: Real>(history: &[Vec<T>], beta: T) -> Result<ChannelEstimate<T>> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(invalid("predict.beta", "must lie in (0, 1)"));
    }
    let n = history.first().map_or(0, Vec::len);
    if history.iter().any(|h| h.len() != n) {
        return Err(invalid("history", "every capture must cover the same beams"));
    }
    let mut sums = vec![T::zero(); n];
    let mut counts = vec![0usize; n];
    let mut weight = T::one();
    for lag in history {
        weight = weight * beta;
        for (k, &h) in lag.iter().enumerate() {
            if h != T::zero() {
                sums[k] = sums[k] + weight * h;
                counts[k] += 1;
            }
        }
    }
    let gains =
        sums.iter().zip(&counts).map(|(&s, &c)| if c == 0 { T::zero() } else { s / T::from_count(c) }).collect();
    let valid = counts.iter().map(|&c| c > 0).collect();
    Ok(ChannelEstimate { gains, valid })
}

/// Turns exhaustive captures into per-beam channel estimates, newest
/// capture first, ready for [`predict_channel`]. `gain` is the product of
/// the nominal mainlobe gains the BS assumes for every beam.
pub fn estimates_from_captures<'a, T: Real>(
    captures: impl DoubleEndedIterator<Item = &'a BeamCapture<T>>,
    gain: T,
) -> Vec<Vec<T>> {
    captures
        .rev()
        .map(|cap| {
            cap.cells
                .iter()
                .map(|cell| match *cell {
                    Some((snr, power)) if power > T::zero() => {
                        estimate_channel(snr, power, gain, T::one(), cap.noise_power).unwrap_or(T::zero())
                    }
                    _ => T::zero(),
                })
                .collect()
        })
        .collect()
}

/// Largest number of beams that fits in one interval.
pub fn max_training_beams<T: Real>(budget: &FrameBudget<T>) -> usize {
    let q = ((budget.t_ti - budget.fixed_overhead()) / budget.t_bt).max(T::zero());
    let nearest = q.round();
    let n = if (q - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) { nearest } else { q.floor() };
    n.to_usize().unwrap_or(usize::MAX)
}

/// Ranks valid beams by predicted `H * G` and keeps the best `n_be` that
/// clear the decodability screen `P_be * H * G >= gamma_dec * noise`.
/// Fails when no candidate clears the `gamma_th` screen.
#[allow(clippy::too_many_arguments)]
pub fn init_top_beams<T: Real>(
    est: &ChannelEstimate<T>,
    n_v: usize,
    n_be: usize,
    power_cap: T,
    gamma_th: T,
    gamma_dec: T,
    noise_power: T,
    gains: &[T],
) -> Result<BeamPolicy> {
    if gains.len() != est.gains.len() || n_v == 0 || !est.gains.len().is_multiple_of(n_v) {
        return Err(invalid("gains", "one gain per codebook beam required"));
    }
    let mut ranked: Vec<(usize, T)> = est
        .gains
        .iter()
        .zip(gains)
        .enumerate()
        .filter(|&(k, _)| est.valid[k])
        .map(|(k, (&h, &g))| (k, h * g))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let dec_floor = gamma_dec * noise_power;
    let kept: Vec<(usize, T)> = ranked.into_iter().filter(|&(_, hg)| power_cap * hg >= dec_floor).take(n_be).collect();
    let feasible = kept.iter().any(|&(_, hg)| power_cap * hg >= gamma_th * noise_power);
    if !feasible {
        return Err(Error::Infeasible);
    }
    let beams = kept.into_iter().map(|(k, _)| (k / n_v, k % n_v)).collect();
    Ok(BeamPolicy::explicit(beams, Direction::Other))
}
