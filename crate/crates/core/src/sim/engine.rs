use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::SimConfig;
use super::user::{step_user, UserState};
use crate::error::Result;
use crate::metrics::{
    alignment_accuracy, avg_power_of, effective_rate, energy_efficiency, overhead_ratio, pick_optimal, snr,
    training_latency_with, training_power, BeamCapture, BeamIndex, FeedbackModel, HistoryWindow, MetricRecord,
};
use crate::phys::{path_gain, sample_fading, Axis, BeamCodebook, Geometry};
use crate::power::{action_to_power, min_feasible_action, normalize_total, PowerAgent, QTable};
use crate::real::Real;
use crate::select::{
    binary_search, eetbf_bt, estimates_from_captures, exhaustive_policy, init_top_beams, iterative_search,
    linear_policy, max_training_beams, predict_channel, random_policy, AxisHistory, BeamPolicy, Scheme, Sector,
};

/// Independent random streams of one run, so that for a given seed every
/// scheme sees the same user trajectory.
const STREAM_MOBILITY: u64 = 0;
const STREAM_POLICY: u64 = 1;
const STREAM_FADING: u64 = 2;

/// Per-run counters of constraint violations and corrective actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Violations {
    /// Frames whose best beam missed `gamma_th`.
    pub c1: usize,
    /// Frames with at least one trained beam below `gamma_dec`.
    pub c1_1: usize,
    /// Frames whose averaged power exceeded `P_th`.
    pub c3: usize,
    /// Frames whose executed training overran the interval.
    pub c4: usize,
    /// Post-warm-up frames that started with accuracy below `xi_th`.
    pub c5: usize,
    /// Policies cut down to fit the interval.
    pub truncations: usize,
    /// Post-warm-up frames that reverted to a full sweep.
    pub fallbacks: usize,
    /// Frames whose powers were scaled down to meet `P_th`.
    pub normalizations: usize,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub records: Vec<MetricRecord<T>>,
    pub policy_sizes: Vec<usize>,
    pub violations: Violations,
    pub q_table: QTable<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> RunResult<T> {
    /// The trailing `fraction` of the frames (at least one).
    pub fn steady_state(&self, fraction: f64) -> &[MetricRecord<T>] {
        steady_window(&self.records, fraction)
    }
}

/// The trailing `fraction` of `records`, never empty unless `records` is.
pub fn steady_window<T>(records: &[MetricRecord<T>], fraction: f64) -> &[MetricRecord<T>] {
    let keep = ((records.len() as f64) * fraction.clamp(0.0, 1.0)).ceil() as usize;
    let keep = keep.max(1).min(records.len());
    &records[records.len() - keep..]
}

/// Arithmetic means over a window of frames.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary<T> {
    pub frames: usize,
    pub n_beams: T,
    pub latency: T,
    pub snr_db: T,
    pub rate: T,
    pub avg_power: T,
    pub training_power: T,
    pub ee: T,
    pub accuracy: T,
}

pub fn summarize<T: Real>(records: &[MetricRecord<T>]) -> Summary<T> {
    if records.is_empty() {
        return Summary::default();
    }
    let n = T::from_count(records.len());
    let mean = |f: &dyn Fn(&MetricRecord<T>) -> T| records.iter().map(f).sum::<T>() / n;
    Summary {
        frames: records.len(),
        n_beams: mean(&|r| T::from_count(r.n_beams)),
        latency: mean(&|r| r.latency),
        snr_db: mean(&|r| r.snr_db()),
        rate: mean(&|r| r.rate),
        avg_power: mean(&|r| r.avg_power),
        training_power: mean(&|r| r.training_power),
        ee: mean(&|r| r.ee),
        accuracy: mean(&|r| r.accuracy),
    }
}

/// What a frame is going to train.
enum Plan<T> {
    Beams { policy: BeamPolicy, power: T, action: Option<usize>, exhaustive: bool },
    Search { power: T, action: Option<usize> },
}

/// Frame-by-frame executor of one run.
#[derive(Debug, Clone)]
pub struct Simulator<T: Real> {
    config: SimConfig<T>,
    codebook: BeamCodebook<T>,
    n_be: usize,
    power_control: bool,
    truncate: bool,
    user: UserState<T>,
    history: HistoryWindow<T>,
    agent: PowerAgent<T>,
    mobility: ChaCha8Rng,
    policy_rng: ChaCha8Rng,
    fading_rng: ChaCha8Rng,
    frame: usize,
    violations: Violations,
    warnings: Vec<String>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

impl<T: Real> Simulator<T> {
    pub fn new(config: SimConfig<T>) -> Result<Self> {
        let warnings = config.validate()?;
        let codebook = config.codebook()?;
        let mut mobility = stream(config.seed, STREAM_MOBILITY);
        let user = UserState::random_start(config.radius, config.user_height, config.speed, &mut mobility);
        Ok(Self {
            n_be: max_training_beams(&config.budget),
            power_control: config.power_control_enabled(),
            truncate: config.truncation_enabled(),
            history: HistoryWindow::new(config.history),
            agent: PowerAgent::new(&config.pa),
            policy_rng: stream(config.seed, STREAM_POLICY),
            fading_rng: stream(config.seed, STREAM_FADING),
            mobility,
            user,
            codebook,
            config,
            frame: 0,
            violations: Violations::default(),
            warnings,
        })
    }

    /// Starts from a previously learned Q-table instead of an all-zero one.
    pub fn with_q_table(mut self, table: QTable<T>) -> Result<Self> {
        if table.states() != self.config.pa.s_q + 1 || table.q_levels() != self.config.pa.q_levels {
            return Err(crate::error::invalid("q_table", "shape does not match pa.s_q and pa.q_levels"));
        }
        self.agent = PowerAgent::with_table(table);
        Ok(self)
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.config
    }

    pub fn codebook(&self) -> &BeamCodebook<T> {
        &self.codebook
    }

    pub fn user(&self) -> &UserState<T> {
        &self.user
    }

    pub fn history(&self) -> &HistoryWindow<T> {
        &self.history
    }

    pub fn agent(&self) -> &PowerAgent<T> {
        &self.agent
    }

    pub fn violations(&self) -> Violations {
        self.violations
    }

    pub fn frame(&self) -> usize {
        self.frame
    }

    /// Moves the user by one interval.
    pub fn step_user(&mut self) {
        self.user = step_user(&self.user, self.config.budget.t_ti, self.config.radius, &mut self.mobility);
    }

    /// Largest number of beams (or probes) that fits one interval.
    fn beam_cap(&self, feedback: FeedbackModel) -> usize {
        match feedback {
            FeedbackModel::Once => self.n_be,
            FeedbackModel::PerBeam => {
                let b = &self.config.budget;
                let q = ((b.t_ti - b.t_rq - b.t_ac) / (b.t_bt + b.t_fb)).max(T::zero());
                q.floor().to_usize().unwrap_or(0)
            }
        }
    }

    /// A full sweep cut to `n_max` beams: beams ranked by the predicted
    /// channel first, then beams without an estimate, then the rest, each
    /// group in row-major order.
    fn ranked_sweep(&self, n_max: usize) -> BeamPolicy {
        let len = self.codebook.len();
        let captures = self.history.captures();
        let noise = match self.history.captures().last() {
            Some(c) if self.config.top_init => c.noise_power,
            _ => {
                let mut p = exhaustive_policy(&self.codebook);
                p.truncate(n_max);
                return p;
            }
        };
        let nominal = self.codebook.nominal_gain();
        let per_capture = estimates_from_captures(captures, nominal);
        let mut order: Vec<usize> = Vec::with_capacity(n_max);
        let mut taken = vec![false; len];
        let mut valid = vec![false; len];
        if let Ok(est) = predict_channel(&per_capture, self.config.beta) {
            valid.clone_from(&est.valid);
            let gains = vec![nominal; len];
            if let Ok(top) = init_top_beams(
                &est,
                self.codebook.n_v(),
                n_max,
                self.config.pa.p_be,
                self.config.gamma_th,
                self.config.gamma_dec,
                noise,
                &gains,
            ) {
                for (i, j) in top.beams {
                    let k = self.codebook.flat(i, j);
                    taken[k] = true;
                    order.push(k);
                }
            }
        }
        for pass_unestimated in [true, false] {
            for k in 0..len {
                if order.len() >= n_max {
                    break;
                }
                if !taken[k] && (!pass_unestimated || !valid[k]) {
                    taken[k] = true;
                    order.push(k);
                }
            }
        }
        BeamPolicy::explicit(
            order.into_iter().map(|k| self.codebook.unflat(k)).collect(),
            crate::select::Direction::Exhaustive,
        )
    }

    /// Lowest admissible power level for training `beams`, from the channel
    /// predicted over the stored captures.
    fn min_action(&self, beams: &[BeamIndex]) -> usize {
        let pa = &self.config.pa;
        let noise = match self.history.captures().last() {
            Some(c) if pa.snr_floor => c.noise_power,
            _ => return 1,
        };
        let nominal = self.codebook.nominal_gain();
        let per_capture = estimates_from_captures(self.history.captures(), nominal);
        let Ok(est) = predict_channel(&per_capture, self.config.beta) else {
            return 1;
        };
        let best = beams
            .iter()
            .map(|&(i, j)| self.codebook.flat(i, j))
            .filter(|&k| est.valid[k])
            .map(|k| est.gains[k] * nominal)
            .fold(None, |m: Option<T>, hg| Some(m.map_or(hg, |m| m.max(hg))));
        match best {
            Some(hg) => min_feasible_action(hg, noise, self.config.gamma_th, pa),
            None => 1,
        }
    }

    fn pa_power(&mut self, active: bool, beams: &[BeamIndex]) -> (T, Option<usize>) {
        if active {
            let floor = self.min_action(beams);
            let action = self.agent.act_from(&self.config.pa, floor, &mut self.policy_rng);
            let power = action_to_power(action, &self.config.pa).expect("agent actions lie in 1..=Q");
            (power, Some(action))
        } else {
            (self.config.pa.p_be, None)
        }
    }

    fn plan(&mut self, accuracy: T) -> Plan<T> {
        let t = self.frame;
        let warm = t < self.config.history;
        let pa_active = self.power_control && !warm;
        let policy = match self.config.scheme {
            Scheme::Eetbf => {
                let selected = if warm || accuracy < self.config.xi_th {
                    None
                } else {
                    let h = AxisHistory::from_window(&self.history, Axis::Horizontal);
                    let v = AxisHistory::from_window(&self.history, Axis::Vertical);
                    eetbf_bt(&h, &v, &self.codebook, self.config.gamma_th, self.config.center_rule).ok()
                };
                match selected {
                    Some(policy) => policy,
                    None => {
                        if !warm {
                            self.violations.fallbacks += 1;
                        }
                        let policy = exhaustive_policy(&self.codebook);
                        return Plan::Beams { policy, power: self.config.pa.p_be, action: None, exhaustive: true };
                    }
                }
            }
            Scheme::Exhaustive => exhaustive_policy(&self.codebook),
            Scheme::Random => random_policy(&self.codebook, self.config.random_beams, &mut self.policy_rng),
            Scheme::Linear => match self.history.latest() {
                Some(rec) => linear_policy(&self.codebook, rec.beam, self.config.linear_window),
                None => exhaustive_policy(&self.codebook),
            },
            Scheme::Iterative | Scheme::Binary => {
                let (power, action) = self.pa_power(pa_active, &[]);
                return Plan::Search { power, action };
            }
        };
        let exhaustive = policy.len() == self.codebook.len();
        let (power, action) = self.pa_power(pa_active, &policy.beams);
        Plan::Beams { policy, power, action, exhaustive }
    }

    /// Runs the current frame and advances the frame counter. The user is
    /// not moved; see [`Simulator::step_user`].
    pub fn run_frame(&mut self) -> MetricRecord<T> {
        let t = self.frame;
        let cfg = self.config.clone();
        let geo = Geometry { bs_height: cfg.bs_height, user_pos: self.user.position };
        let d = geo.distance();
        let (az, el) = geo.boresight();
        let noise = cfg.channel.noise_power(d);
        let h0 = path_gain(&cfg.channel, d, T::one()).expect("BS and user heights differ");
        let eps = cfg.antenna.eps_sidelobe;
        let feedback = cfg.scheme.feedback();

        let accuracy = alignment_accuracy(&self.history, cfg.gamma_th);
        if t >= cfg.history && accuracy < cfg.xi_th {
            self.violations.c5 += 1;
        }

        let plan = self.plan(accuracy);
        let (beams, planned, action, exhaustive, searched) = match plan {
            Plan::Beams { mut policy, power, action, exhaustive } => {
                if training_latency_with(policy.len(), &cfg.budget, feedback) > cfg.budget.t_ti {
                    if self.truncate {
                        let cap = self.beam_cap(feedback);
                        policy = if exhaustive {
                            self.ranked_sweep(cap)
                        } else {
                            policy.truncate(cap);
                            policy
                        };
                        self.violations.truncations += 1;
                    } else {
                        self.violations.c4 += 1;
                    }
                }
                (policy.beams, power, action, exhaustive, None)
            }
            Plan::Search { power, action } => {
                let codebook = &self.codebook;
                let fading_rng = &mut self.fading_rng;
                let mut measure = |s: &Sector| {
                    let rho = sample_fading::<T, _>(cfg.fading, fading_rng);
                    let gh = codebook.sector_gain(Axis::Horizontal, s.h.start, s.h.end, az, eps);
                    let gv = codebook.sector_gain(Axis::Vertical, s.v.start, s.v.end, el, eps);
                    snr(power, h0 * rho, gh, gv, noise).expect("noise power is positive")
                };
                let outcome = if cfg.scheme == Scheme::Binary {
                    binary_search(codebook.n_h(), codebook.n_v(), &mut measure)
                } else {
                    iterative_search(codebook.n_h(), codebook.n_v(), cfg.tree_branching, &mut measure)
                };
                if training_latency_with(outcome.probes.len(), &cfg.budget, feedback) > cfg.budget.t_ti {
                    self.violations.c4 += 1;
                }
                (Vec::new(), power, action, false, Some(outcome))
            }
        };

        let n_trained = searched.as_ref().map_or(beams.len(), |o| o.probes.len());
        let latency = training_latency_with(n_trained, &cfg.budget, feedback);
        let planned_powers = vec![planned; n_trained];
        let scaled = normalize_total(&planned_powers, planned, &cfg.budget, latency, &cfg.pa);
        if scaled.factor < T::one() {
            self.violations.normalizations += 1;
        }
        let beam_power = scaled.p_data;

        let (best, gamma_star, min_snr, cells) = match searched {
            Some(outcome) => {
                // probe SNRs scale linearly with the transmit power
                let f = scaled.factor;
                let min = outcome.probes.iter().fold(T::infinity(), |m, (_, g)| m.min(*g * f));
                (outcome.best, outcome.best_snr * f, min, None)
            }
            None => {
                let gh = self.codebook.axis_gains(Axis::Horizontal, az, eps);
                let gv = self.codebook.axis_gains(Axis::Vertical, el, eps);
                let grid: Vec<(BeamIndex, T)> = beams
                    .iter()
                    .zip(&scaled.powers)
                    .map(|(&(i, j), &p)| {
                        let rho = sample_fading::<T, _>(cfg.fading, &mut self.fading_rng);
                        ((i, j), snr(p, h0 * rho, gh[i], gv[j], noise).expect("noise power is positive"))
                    })
                    .collect();
                let (best, gamma_star) = match pick_optimal(&grid) {
                    Ok(pick) => pick,
                    // nothing fits the interval: no beam, no link
                    Err(_) => ((0, 0), T::zero()),
                };
                let min = grid.iter().fold(T::infinity(), |m, &(_, g)| m.min(g));
                let mut cells = vec![None; self.codebook.len()];
                for (&((i, j), g), &p) in grid.iter().zip(&scaled.powers) {
                    cells[self.codebook.flat(i, j)] = Some((g, p));
                }
                let cells = (!grid.is_empty()).then_some(cells);
                (best, gamma_star, min, cells)
            }
        };

        if gamma_star < cfg.gamma_th {
            self.violations.c1 += 1;
        }
        if n_trained > 0 && min_snr < cfg.gamma_dec {
            self.violations.c1_1 += 1;
        }

        let rate = effective_rate(cfg.channel.bandwidth, latency, &cfg.budget, gamma_star, cfg.gamma_th);
        let data_power = if n_trained > 0 { beam_power } else { T::zero() };
        let avg_power = avg_power_of(&scaled.powers, &cfg.budget, latency, data_power);
        if avg_power > cfg.pa.p_th {
            self.violations.c3 += 1;
        }
        let ee = energy_efficiency(rate, avg_power).unwrap_or(T::zero());

        if let Some(cells) = cells {
            self.history.push_capture(BeamCapture { frame: t, noise_power: noise, cells });
        }
        let window_rate_max = self.history.max_rate();
        if self.power_control {
            // full-power frames train at the top level, action Q
            let a = action.unwrap_or(cfg.pa.q_levels);
            self.agent.learn(a, ee, rate, window_rate_max, &cfg.pa);
        }
        self.history.push(t, best, gamma_star, rate, cfg.gamma_th);
        self.frame += 1;

        MetricRecord {
            frame: t,
            t_sec: T::from_count(t) * cfg.budget.t_ti,
            scheme: cfg.scheme,
            n_beams: n_trained,
            latency,
            alpha: overhead_ratio(latency, &cfg.budget),
            beam: best,
            snr: gamma_star,
            rate,
            avg_power,
            training_power: training_power(&scaled.powers, &cfg.budget),
            beam_power,
            ee,
            accuracy,
            exhaustive,
        }
    }

    /// Runs every configured frame, moving the user after each one.
    pub fn run(mut self) -> RunResult<T> {
        let mut records = Vec::with_capacity(self.config.frames);
        for _ in 0..self.config.frames {
            records.push(self.run_frame());
            self.step_user();
        }
        let policy_sizes = records.iter().map(|r| r.n_beams).collect();
        RunResult {
            records,
            policy_sizes,
            violations: self.violations,
            q_table: self.agent.table,
            warnings: self.warnings,
        }
    }
}

/// Validates `config` and runs it to completion.
pub fn run_sim<T: Real>(config: SimConfig<T>) -> Result<RunResult<T>> {
    Ok(Simulator::new(config)?.run())
}
