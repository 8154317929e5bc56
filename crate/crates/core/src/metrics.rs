//! Protocol accounting: per-beam SNR, optimal-beam feedback, training
//! latency, effective rate, time-averaged power, energy efficiency,
//! alignment accuracy and the bounded history of training outcomes.

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::real::{linear_to_db, Real};
use crate::select::Scheme;

/// A beam index pair `(horizontal, vertical)`.
pub type BeamIndex = (usize, usize);

/// Lowest SNR reported in dB, used when the linear SNR is exactly zero.
pub const SNR_DB_FLOOR: f64 = -200.0;

/// Timing of one transmission interval (all in seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBudget<T> {
    pub t_ti: T,
    pub t_bt: T,
    pub t_rq: T,
    pub t_fb: T,
    pub t_ac: T,
}

impl<T: Real> Default for FrameBudget<T> {
    fn default() -> Self {
        let slot = T::lit(10e-6);
        Self { t_ti: T::lit(0.05), t_bt: slot, t_rq: slot, t_fb: slot, t_ac: slot }
    }
}

impl<T: Real> FrameBudget<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("frame.t_ti_s", self.t_ti),
            ("frame.t_bt_s", self.t_bt),
            ("frame.t_rq_s", self.t_rq),
            ("frame.t_fb_s", self.t_fb),
            ("frame.t_ac_s", self.t_ac),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "durations must be positive"));
            }
        }
        if !(self.fixed_overhead() < self.t_ti) {
            return Err(invalid("frame.t_ti_s", "request, feedback and ack leave no training time"));
        }
        Ok(())
    }

    /// `T_rq + T_fb + T_ac`.
    pub fn fixed_overhead(&self) -> T {
        self.t_rq + self.t_fb + self.t_ac
    }
}

/// How often the user reports back during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackModel {
    /// A single report after the whole sweep.
    Once,
    /// A report after every trained beam.
    PerBeam,
}

impl FeedbackModel {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackModel::Once => "once",
            FeedbackModel::PerBeam => "per-beam",
        }
    }
}

/// Beams trained in one frame and the power each was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    pub beams: Vec<BeamIndex>,
    pub powers: Vec<T>,
}

impl<T: Real> TrainingSet<T> {
    /// Cartesian span of the two axis sets, all at the same power.
    pub fn span(h_indexes: &[usize], v_indexes: &[usize], power: T) -> Self {
        let beams: Vec<BeamIndex> = h_indexes.iter().flat_map(|&i| v_indexes.iter().map(move |&j| (i, j))).collect();
        let powers = vec![power; beams.len()];
        Self { beams, powers }
    }

    pub fn uniform(beams: Vec<BeamIndex>, power: T) -> Self {
        let powers = vec![power; beams.len()];
        Self { beams, powers }
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn validate(&self, n_h: usize, n_v: usize, p_be: T) -> Result<()> {
        if self.beams.len() != self.powers.len() {
            return Err(invalid("training_set", "one power per beam required"));
        }
        if self.beams.iter().any(|&(i, j)| i >= n_h || j >= n_v) {
            return Err(invalid("training_set", "beam index out of codebook bounds"));
        }
        if self.powers.iter().any(|&p| !(p > T::zero() && p <= p_be)) {
            return Err(invalid("training_set", "per-beam power must lie in (0, P_be]"));
        }
        Ok(())
    }
}

/// `gamma = P * H * G_h * G_v / noise`.
pub fn snr<T: Real>(power: T, channel_gain: T, gain_h: T, gain_v: T, noise_power: T) -> Result<T> {
    if !(noise_power > T::zero()) {
        return Err(invalid("noise_power", "must be positive"));
    }
    Ok(power * channel_gain * gain_h * gain_v / noise_power)
}

/// Argmax over trained beams; ties go to the lexicographically smallest
/// index pair.
pub fn pick_optimal<T: Real>(snr_grid: &[(BeamIndex, T)]) -> Result<(BeamIndex, T)> {
    let mut best: Option<(BeamIndex, T)> = None;
    for &(beam, gamma) in snr_grid {
        best = match best {
            None => Some((beam, gamma)),
            Some((b, g)) if gamma > g || (gamma == g && beam < b) => Some((beam, gamma)),
            keep => keep,
        };
    }
    best.ok_or(Error::EmptyTrainingSet)
}

/// `|phi| * T_bt + T_rq + T_fb + T_ac`.
pub fn training_latency<T: Real>(n_beams: usize, budget: &FrameBudget<T>) -> T {
    T::from_count(n_beams) * budget.t_bt + budget.fixed_overhead()
}

/// Training latency under the given feedback model; per-beam feedback pays
/// `T_fb` for every trained beam.
pub fn training_latency_with<T: Real>(n_beams: usize, budget: &FrameBudget<T>, feedback: FeedbackModel) -> T {
    match feedback {
        FeedbackModel::Once => training_latency(n_beams, budget),
        FeedbackModel::PerBeam => T::from_count(n_beams) * (budget.t_bt + budget.t_fb) + budget.t_rq + budget.t_ac,
    }
}

/// `alpha = latency / T_TI`.
pub fn overhead_ratio<T: Real>(latency: T, budget: &FrameBudget<T>) -> T {
    latency / budget.t_ti
}

/// Effective throughput (bit/s) after training overhead; zero when the
/// training fills the interval or the best beam misses the threshold.
pub fn effective_rate<T: Real>(bandwidth: T, latency: T, budget: &FrameBudget<T>, gamma_star: T, gamma_th: T) -> T {
    let share = (T::one() - overhead_ratio(latency, budget)).max(T::zero());
    let usable = if gamma_star >= gamma_th { gamma_star } else { T::zero() };
    bandwidth * share * (T::one() + usable).log2()
}

/// Training-phase power averaged over the interval: `sum(T_bt * P) / T_TI`.
pub fn training_power<T: Real>(powers: &[T], budget: &FrameBudget<T>) -> T {
    powers.iter().fold(T::zero(), |acc, &p| acc + budget.t_bt * p) / budget.t_ti
}

/// Time-averaged power over the interval, training plus data phase. The
/// data window is clamped at zero when training overruns the interval.
pub fn avg_power<T: Real>(training: &TrainingSet<T>, budget: &FrameBudget<T>, latency: T, p_data: T) -> T {
    avg_power_of(&training.powers, budget, latency, p_data)
}

/// [`avg_power`] over a bare slice of per-beam (or per-probe) powers.
pub fn avg_power_of<T: Real>(powers: &[T], budget: &FrameBudget<T>, latency: T, p_data: T) -> T {
    let data_window = (budget.t_ti - latency).max(T::zero());
    training_power(powers, budget) + data_window * p_data / budget.t_ti
}

/// `rate / power`, zero for an idle frame.
pub fn energy_efficiency<T: Real>(rate: T, power: T) -> Result<T> {
    if power < T::zero() {
        return Err(invalid("power", "must be non-negative"));
    }
    if power == T::zero() {
        return if rate == T::zero() { Ok(T::zero()) } else { Err(Error::RateWithoutPower) };
    }
    Ok(rate / power)
}

/// Fraction of stored records whose best SNR clears `gamma_th`.
pub fn alignment_accuracy<T: Real>(history: &HistoryWindow<T>, gamma_th: T) -> T {
    if history.is_empty() {
        return T::zero();
    }
    let hits = history.records().filter(|r| r.snr >= gamma_th).count();
    T::from_count(hits) / T::from_count(history.len())
}

/// One frame's training outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord<T> {
    pub frame: usize,
    pub beam: BeamIndex,
    pub snr: T,
    pub success: bool,
    /// Effective rate achieved in that frame (bit/s).
    pub rate: T,
}

/// Per-beam measurements from one exhaustive frame, dense in flat beam
/// index. `None` marks beams that were not trained.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCapture<T> {
    pub frame: usize,
    pub noise_power: T,
    /// `(snr, power)` per flat beam index.
    pub cells: Vec<Option<(T, T)>>,
}

/// Ring buffer of the last `M` training outcomes plus the last `M`
/// exhaustive captures.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow<T> {
    capacity: usize,
    records: VecDeque<HistoryRecord<T>>,
    captures: VecDeque<BeamCapture<T>>,
}

impl<T: Real> HistoryWindow<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "history window needs room for one record");
        Self { capacity, records: VecDeque::with_capacity(capacity), captures: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record, evicting the oldest once full. The success flag is
    /// derived from `gamma_th`.
    pub fn push(&mut self, frame: usize, beam: BeamIndex, snr: T, rate: T, gamma_th: T) {
        if self.records.len() == self.capacity {
            self.records.pop_front();
        }
        self.records.push_back(HistoryRecord { frame, beam, snr, success: snr >= gamma_th, rate });
    }

    pub fn push_capture(&mut self, capture: BeamCapture<T>) {
        if self.captures.len() == self.capacity {
            self.captures.pop_front();
        }
        self.captures.push_back(capture);
    }

    /// Records in insertion order, oldest first.
    pub fn records(&self) -> impl DoubleEndedIterator<Item = &HistoryRecord<T>> + ExactSizeIterator {
        self.records.iter()
    }

    pub fn latest(&self) -> Option<&HistoryRecord<T>> {
        self.records.back()
    }

    /// Exhaustive captures, oldest first.
    pub fn captures(&self) -> impl DoubleEndedIterator<Item = &BeamCapture<T>> + ExactSizeIterator {
        self.captures.iter()
    }

    /// Largest stored rate, zero when empty.
    pub fn max_rate(&self) -> T {
        self.records.iter().fold(T::zero(), |m, r| m.max(r.rate))
    }

    pub fn clear(&mut self) {
        self.records.clear();
        self.captures.clear();
    }
}

/// Per-frame outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord<T> {
    pub frame: usize,
    pub t_sec: T,
    pub scheme: Scheme,
    pub n_beams: usize,
    pub latency: T,
    pub alpha: T,
    pub beam: BeamIndex,
    pub snr: T,
    pub rate: T,
    pub avg_power: T,
    /// Training term of the averaged power.
    pub training_power: T,
    /// Per-beam training power used this frame (W).
    pub beam_power: T,
    pub ee: T,
    /// Accuracy of the window the frame's decision was based on.
    pub accuracy: T,
    /// The frame ran a full-codebook sweep (warm-up or fallback).
    pub exhaustive: bool,
}

impl<T: Real> MetricRecord<T> {
    pub fn snr_db(&self) -> T {
        if self.snr > T::zero() {
            linear_to_db(self.snr).max(T::lit(SNR_DB_FLOOR))
        } else {
            T::lit(SNR_DB_FLOOR)
        }
    }
}
