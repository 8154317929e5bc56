//! Training-power assignment: epsilon-greedy tabular Q-learning over a
//! quantized power set, plus the total-power normalization.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::metrics::{avg_power_of, FrameBudget};
use crate::real::{dbm_to_watts, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct PaSettings<T> {
    /// Exploration probability.
    pub delta_th: T,
    /// Learning rate.
    pub eta1: T,
    /// Discount factor.
    pub eta2: T,
    /// Per-beam power cap (W).
    pub p_be: T,
    /// Cap on the interval-averaged power (W).
    pub p_th: T,
    /// Number of power levels `Q`.
    pub q_levels: usize,
    /// State quantization scale `s_Q`; the table has `s_Q + 1` rows.
    pub s_q: usize,
    /// Divide rewards by the running maximum EE before learning.
    pub reward_normalize: bool,
    /// Use the all-time maximum rate instead of the window maximum.
    pub rmax_global: bool,
    /// Restrict actions to levels whose predicted best-beam SNR clears
    /// `gamma_th` (all levels when no prediction exists).
    pub snr_floor: bool,
}

impl<T: Real> Default for PaSettings<T> {
    fn default() -> Self {
        Self {
            delta_th: T::lit(0.15),
            eta1: T::lit(0.5),
            eta2: T::lit(0.5),
            p_be: dbm_to_watts(T::lit(15.0)),
            p_th: dbm_to_watts(T::lit(27.0)),
            q_levels: 20,
            s_q: 100,
            reward_normalize: true,
            rmax_global: false,
            snr_floor: true,
        }
    }
}

impl<T: Real> PaSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_th >= T::zero() && self.delta_th <= T::one()) {
            return Err(invalid("pa.delta_th", "must lie in [0, 1]"));
        }
        if !(self.eta1 > T::zero() && self.eta1 <= T::one()) {
            return Err(invalid("pa.eta1", "must lie in (0, 1]"));
        }
        if !(self.eta2 >= T::zero() && self.eta2 < T::one()) {
            return Err(invalid("pa.eta2", "must lie in [0, 1)"));
        }
        if !(self.p_be > T::zero()) {
            return Err(invalid("pa.p_be_dbm", "must be a positive power"));
        }
        if !(self.p_be <= self.p_th) {
            return Err(invalid("pa.p_th_dbm", "must not be below the per-beam cap"));
        }
        if self.q_levels == 0 {
            return Err(invalid("pa.q_levels", "must be at least 1"));
        }
        if self.s_q == 0 {
            return Err(invalid("pa.s_q", "must be at least 1"));
        }
        Ok(())
    }
}

/// Action values, one row per state and one column per power level.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable<T> {
    values: Vec<T>,
    states: usize,
    actions: usize,
}

impl<T: Real> QTable<T> {
    /// Zero table with `s_q + 1` states and `q_levels` actions.
    pub fn new(s_q: usize, q_levels: usize) -> Self {
        let states = s_q + 1;
        Self { values: vec![T::zero(); states * q_levels], states, actions: q_levels }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn q_levels(&self) -> usize {
        self.actions
    }

    /// Value of 1-based `action` in `state`.
    pub fn get(&self, state: usize, action: usize) -> T {
        self.values[self.cell(state, action)]
    }

    pub fn set(&mut self, state: usize, action: usize, value: T) {
        let k = self.cell(state, action);
        self.values[k] = value;
    }

    pub fn row(&self, state: usize) -> &[T] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    /// 1-based argmax of a row; ties go to the smallest action.
    pub fn best_action(&self, state: usize) -> usize {
        self.best_action_from(state, 1)
    }

    /// Argmax over actions `min_action..=Q`; ties go to the smallest.
    pub fn best_action_from(&self, state: usize, min_action: usize) -> usize {
        let row = self.row(state);
        let first = min_action.clamp(1, self.actions) - 1;
        let mut best = first;
        for (k, &v) in row.iter().enumerate().skip(first + 1) {
            if v > row[best] {
                best = k;
            }
        }
        best + 1
    }

    pub fn max_value(&self, state: usize) -> T {
        self.row(state).iter().copied().fold(T::neg_infinity(), T::max)
    }

    fn cell(&self, state: usize, action: usize) -> usize {
        assert!(state < self.states, "state {state} out of range");
        assert!(action >= 1 && action <= self.actions, "action {action} out of range");
        state * self.actions + action - 1
    }

    /// Plain-text dump: a `s_q q_levels` header, then one row per state.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {}\n", self.states - 1, self.actions);
        for s in 0..self.states {
            let row: Vec<String> = self.row(s).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::QTableFormat { line, reason: reason.into() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| bad(1, "header must be `s_q q_levels`")))
            .collect::<Result<_>>()?;
        let [s_q, q_levels] = dims[..] else {
            return Err(bad(1, "header must be `s_q q_levels`"));
        };
        if q_levels == 0 {
            return Err(bad(1, "q_levels must be positive"));
        }
        let mut table = Self::new(s_q, q_levels);
        let mut rows = 0;
        for (n, line) in lines {
            if rows == table.states {
                return Err(bad(n + 1, "more rows than states"));
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse().map_err(|_| bad(n + 1, "unparsable value")))
                .collect::<Result<_>>()?;
            if vals.len() != q_levels {
                return Err(bad(n + 1, "row length differs from q_levels"));
            }
            for (a, v) in vals.into_iter().enumerate() {
                table.set(rows, a + 1, T::lit(v));
            }
            rows += 1;
        }
        if rows != table.states {
            return Err(bad(0, "fewer rows than states"));
        }
        Ok(table)
    }
}

/// Epsilon-greedy choice: a uniform random level with probability
/// `delta_th`, else the row argmax. Returns a 1-based action.
pub fn choose_action<T: Real, R: Rng + ?Sized>(
    q: &QTable<T>,
    state: usize,
    settings: &PaSettings<T>,
    rng: &mut R,
) -> usize {
    choose_action_from(q, state, settings, 1, rng)
}

/// [`choose_action`] restricted to the levels `min_action..=Q`.
pub fn choose_action_from<T: Real, R: Rng + ?Sized>(
    q: &QTable<T>,
    state: usize,
    settings: &PaSettings<T>,
    min_action: usize,
    rng: &mut R,
) -> usize {
    let min_action = min_action.clamp(1, q.q_levels());
    let delta: f64 = rng.random();
    if delta <= settings.delta_th.as_f64() {
        rng.random_range(min_action..=q.q_levels())
    } else {
        q.best_action_from(state, min_action)
    }
}

/// Lowest level whose predicted SNR `P * h_hat_g / noise` reaches
/// `gamma_th`, where `h_hat_g` is the best predicted channel-times-gain in
/// the training set; `Q` when even `P_be` falls short.
pub fn min_feasible_action<T: Real>(h_hat_g: T, noise_power: T, gamma_th: T, settings: &PaSettings<T>) -> usize {
    if !(h_hat_g > T::zero()) {
        return settings.q_levels;
    }
    let p_min = gamma_th * noise_power / h_hat_g;
    let levels = (p_min * T::from_count(settings.q_levels) / settings.p_be).ceil();
    levels.max(T::one()).to_usize().unwrap_or(settings.q_levels).min(settings.q_levels)
}

/// `a * P_be / Q`.
pub fn action_to_power<T: Real>(action: usize, settings: &PaSettings<T>) -> Result<T> {
    if action == 0 || action > settings.q_levels {
        return Err(invalid("action", format!("must lie in 1..={}", settings.q_levels)));
    }
    // a / Q <= 1 keeps every level at or below P_be after rounding
    Ok(settings.p_be * (T::from_count(action) / T::from_count(settings.q_levels)))
}

/// Powers after enforcing the averaged-power cap.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPower<T> {
    pub powers: Vec<T>,
    pub p_data: T,
    /// Scale applied to every power (1 when the cap was already met).
    pub factor: T,
}

/// Scales every per-beam power and the data power by `P_th / P` when the
/// interval-averaged power `P` exceeds `P_th`.
pub fn normalize_total<T: Real>(
    per_beam: &[T],
    p_data: T,
    budget: &FrameBudget<T>,
    latency: T,
    settings: &PaSettings<T>,
) -> NormalizedPower<T> {
    let total = avg_power_of(per_beam, budget, latency, p_data);
    if total <= settings.p_th {
        return NormalizedPower { powers: per_beam.to_vec(), p_data, factor: T::one() };
    }
    let mut factor = settings.p_th / total;
    loop {
        let powers: Vec<T> = per_beam.iter().map(|&p| p * factor).collect();
        let scaled_data = p_data * factor;
        if avg_power_of(&powers, budget, latency, scaled_data) <= settings.p_th {
            return NormalizedPower { powers, p_data: scaled_data, factor };
        }
        factor = factor * (T::one() - T::epsilon());
    }
}

/// `round(rate * s_Q / r_max)`, half-up and clamped to `[0, s_Q]`.
pub fn next_state<T: Real>(rate: T, r_max: T, s_q: usize) -> usize {
    if !(r_max > T::zero()) {
        return 0;
    }
    let x = (rate * T::from_count(s_q) / r_max + T::lit(0.5)).floor();
    x.max(T::zero()).to_usize().unwrap_or(s_q).min(s_q)
}

/// One-step Q-learning update of a single cell.
pub fn q_update<T: Real>(
    q: &mut QTable<T>,
    state: usize,
    action: usize,
    reward: T,
    next: usize,
    settings: &PaSettings<T>,
) {
    let old = q.get(state, action);
    let target = reward + settings.eta2 * q.max_value(next);
    q.set(state, action, old + settings.eta1 * (target - old));
}

/// Learner state carried across frames of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAgent<T> {
    pub table: QTable<T>,
    pub state: usize,
    ee_max: T,
    rate_max: T,
}

impl<T: Real> PowerAgent<T> {
    pub fn new(settings: &PaSettings<T>) -> Self {
        Self::with_table(QTable::new(settings.s_q, settings.q_levels))
    }

    pub fn with_table(table: QTable<T>) -> Self {
        Self { table, state: 0, ee_max: T::zero(), rate_max: T::zero() }
    }

    pub fn act<R: Rng + ?Sized>(&self, settings: &PaSettings<T>, rng: &mut R) -> usize {
        choose_action(&self.table, self.state, settings, rng)
    }

    pub fn act_from<R: Rng + ?Sized>(&self, settings: &PaSettings<T>, min_action: usize, rng: &mut R) -> usize {
        choose_action_from(&self.table, self.state, settings, min_action, rng)
    }

    /// Moves to the state implied by `rate`; `window_rate_max` is the best
    /// rate over the history window before this frame.
    pub fn observe_rate(&mut self, rate: T, window_rate_max: T, settings: &PaSettings<T>) -> usize {
        let r_max = if settings.rmax_global { self.rate_max } else { window_rate_max };
        self.rate_max = self.rate_max.max(rate);
        next_state(rate, r_max, settings.s_q)
    }

    /// Learns from the EE obtained with `action` and advances the state.
    pub fn learn(&mut self, action: usize, ee: T, rate: T, window_rate_max: T, settings: &PaSettings<T>) {
        self.ee_max = self.ee_max.max(ee);
        let reward = if !settings.reward_normalize {
            ee
        } else if self.ee_max > T::zero() {
            ee / self.ee_max
        } else {
            T::zero()
        };
        let next = self.observe_rate(rate, window_rate_max, settings);
        q_update(&mut self.table, self.state, action, reward, next, settings);
        self.state = next;
    }
}
