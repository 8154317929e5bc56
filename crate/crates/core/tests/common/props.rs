//! Property checks over randomized inputs. Each property is a strategy plus
//! a check function so that both the proptest target and the acceptance
//! runner can drive it.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use beamtrain::metrics::{alignment_accuracy, avg_power_of, effective_rate, snr, training_latency, HistoryWindow};
use beamtrain::phys::{
    beam_gain, mainlobe_gain, molecular_noise, path_gain, AbsorptionTable, Axis, BeamCodebook, FadingModel,
};
use beamtrain::power::{action_to_power, choose_action, normalize_total, q_update, PaSettings, QTable};
use beamtrain::real::{boltzmann, dbm_to_watts};
use beamtrain::select::{
    directional_set, eetbf_bt, estimate_channel, exhaustive_policy, init_top_beams, linear_policy, predict_channel,
    random_policy, AxisHistory, BeamPolicy, ChannelEstimate, Direction,
};
use beamtrain::sim::Simulator;
use beamtrain::{CenterRule, ChannelParams64, FrameBudget64, Scheme, SimConfig64, Toggle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::oracles::policy_is_contiguous;

pub type Check = Result<(), TestCaseError>;
type AxisInput = (Vec<usize>, Vec<f64>);
type EetbfInput = (usize, usize, AxisInput, AxisInput, bool);
type PredictionInput = (Vec<Vec<f64>>, Vec<Vec<f64>>, f64, f64, Vec<usize>);

fn budget(t_ti: f64, slot: f64) -> FrameBudget64 {
    FrameBudget64 { t_ti, t_bt: slot, t_rq: slot, t_fb: slot, t_ac: slot }
}

fn channel_with(freq: f64, k: f64) -> ChannelParams64 {
    ChannelParams64 { freq, absorption: AbsorptionTable::constant(k).unwrap(), ..Default::default() }
}

// ---------------------------------------------------------------- phys

pub fn codebook_sizes() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=128, 1usize..=128)
}

/// Mainlobe gain times beamwidth is 2pi for every beam of the codebook.
pub fn check_gain_width((n_h, n_v): (usize, usize)) -> Check {
    let cb = BeamCodebook::<f64>::downward(n_h, n_v).unwrap();
    for axis in [Axis::Horizontal, Axis::Vertical] {
        let width = cb.beamwidth(axis);
        let g = mainlobe_gain(width);
        prop_assert!((g * width - TAU).abs() <= 2.0 * f64::EPSILON * TAU);
        let dirs = if axis == Axis::Horizontal { &cb.h_directions } else { &cb.v_directions };
        for &d in dirs {
            prop_assert_eq!(beam_gain(d, width, d, 0.1), g);
        }
    }
    Ok(())
}

pub fn path_gain_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.1e12..1e12f64, 1e-6..0.5f64, 0.1..300.0f64, 0.001..50.0f64, 0.05..5.0f64)
}

/// Path gain strictly falls with distance; molecular noise rises towards
/// `k_B T0`.
pub fn check_distance_monotone((f, k, d, step, rho): (f64, f64, f64, f64, f64)) -> Check {
    let ch = channel_with(f, k);
    let (near, far) = (d, d + step);
    prop_assert!(path_gain(&ch, near, rho).unwrap() > path_gain(&ch, far, rho).unwrap());
    let (n1, n2) = (molecular_noise(&ch, near), molecular_noise(&ch, far));
    let sup = boltzmann::<f64>() * ch.ref_temperature;
    prop_assert!(n1 <= n2);
    prop_assert!(n2 <= sup);
    Ok(())
}

pub fn tiling_inputs() -> impl Strategy<Value = (usize, usize, usize, usize, f64, f64)> {
    (1usize..=64, 1usize..=64)
        .prop_flat_map(|(n_h, n_v)| (Just(n_h), Just(n_v), 0..n_h, 0..n_v, 0.01..0.99f64, 0.01..0.99f64))
}

/// Exactly one beam per axis is in its mainlobe for a covered boresight.
pub fn check_tiling((n_h, n_v, i, j, u, w): (usize, usize, usize, usize, f64, f64)) -> Check {
    let cb = BeamCodebook::<f64>::downward(n_h, n_v).unwrap();
    let az = -PI + (i as f64 + u) * cb.theta_h;
    let el = PI / 2.0 + (j as f64 + w) * cb.theta_v;
    for (axis, bore, expect) in [(Axis::Horizontal, az, i), (Axis::Vertical, el, j)] {
        let gains = cb.axis_gains(axis, bore, 0.1);
        let main = mainlobe_gain(cb.beamwidth(axis));
        let hits: Vec<usize> = (0..gains.len()).filter(|&k| gains[k] == main).collect();
        prop_assert_eq!(hits, vec![expect]);
    }
    Ok(())
}

pub fn absorption_tables() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((1e9..5e10f64, 0.0..2.0f64), 1..20).prop_map(|steps| {
        let mut f = 0.0;
        steps
            .into_iter()
            .map(|(df, k)| {
                f += df;
                (f, k)
            })
            .collect()
    })
}

pub fn check_absorption_knots(entries: Vec<(f64, f64)>) -> Check {
    let table = AbsorptionTable::new(entries.clone()).unwrap();
    for (f, k) in entries {
        prop_assert_eq!(table.lookup(f), k);
    }
    Ok(())
}

// ------------------------------------------------------------- metrics

pub fn latency_inputs() -> impl Strategy<Value = (f64, f64, [usize; 3])> {
    (0.01..1.0f64, 1e-7..1e-4f64, [0usize..20_000, 0usize..20_000, 0usize..20_000])
}

pub fn check_latency_affine((t_ti, slot, ns): (f64, f64, [usize; 3])) -> Check {
    let b = budget(t_ti, slot);
    for n in ns {
        let l = training_latency(n, &b);
        let expect = n as f64 * slot + 3.0 * slot;
        prop_assert!((l - expect).abs() <= 1e-12 * expect.max(slot));
    }
    let (a, c) = (ns[0].min(ns[1]), ns[0].max(ns[1]));
    if c > a {
        let slope = (training_latency(c, &b) - training_latency(a, &b)) / (c - a) as f64;
        prop_assert!((slope - slot).abs() <= 1e-9 * slot);
    }
    Ok(())
}

pub fn rate_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.0..0.12f64, 0.0..0.12f64, 0.0..200.0f64, 0.0..50.0f64, 0.0..1.0f64)
}

/// Rate falls with latency and vanishes exactly on overrun or a missed
/// threshold.
pub fn check_rate_latency((l1, l2, gamma, gamma_th, _): (f64, f64, f64, f64, f64)) -> Check {
    let b = budget(0.05, 10e-6);
    let (lo, hi) = (l1.min(l2), l1.max(l2));
    let r_lo = effective_rate(1e9, lo, &b, gamma, gamma_th);
    let r_hi = effective_rate(1e9, hi, &b, gamma, gamma_th);
    prop_assert!(r_hi <= r_lo);
    for (l, r) in [(lo, r_lo), (hi, r_hi)] {
        let zero = l / b.t_ti >= 1.0 || gamma < gamma_th || gamma == 0.0;
        prop_assert_eq!(r == 0.0, zero, "latency {} gamma {} th {}", l, gamma, gamma_th);
    }
    Ok(())
}

pub fn power_vectors() -> impl Strategy<Value = (Vec<f64>, usize, f64, f64)> {
    prop::collection::vec(0.0..0.05f64, 1..200).prop_flat_map(|p| {
        let n = p.len();
        (Just(p), 0..n, 0.0..0.05f64, 0.0..0.05f64)
    })
}

/// Raising any single per-beam power never lowers the averaged power.
pub fn check_avg_power_monotone((powers, k, bump, p_data): (Vec<f64>, usize, f64, f64)) -> Check {
    let b = budget(0.05, 10e-6);
    let latency = training_latency(powers.len(), &b);
    let before = avg_power_of(&powers, &b, latency, p_data);
    let mut raised = powers.clone();
    raised[k] += bump;
    prop_assert!(avg_power_of(&raised, &b, latency, p_data) >= before);
    Ok(())
}

pub fn time_share_inputs() -> impl Strategy<Value = (usize, f64, bool)> {
    (0usize..4997, 1e-6..1.0f64, any::<bool>())
}

/// With uniform power `p` everywhere and training that fits the interval,
/// the averaged power is at most `p`, with equality only when training and
/// data together fill the interval.
pub fn check_time_share((n, p, zero_overhead): (usize, f64, bool)) -> Check {
    let mut b = budget(0.05, 10e-6);
    if zero_overhead {
        b.t_rq = 0.0;
        b.t_fb = 0.0;
        b.t_ac = 0.0;
    }
    let latency = training_latency(n, &b);
    prop_assume!(latency <= b.t_ti);
    let avg = avg_power_of(&vec![p; n], &b, latency, p);
    prop_assert!(avg <= p * (1.0 + 1e-12));
    prop_assert_eq!((avg - p).abs() <= 1e-12 * p, zero_overhead);
    Ok(())
}

pub fn outcome_sequences() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=12, prop::collection::vec(0.0..20.0f64, 0..40))
}

/// Accuracy stays in `[0, 1]`, the window keeps at most `M` records in
/// insertion order, and replacing an evicted failure by a success never
/// lowers the accuracy.
pub fn check_history((m, snrs): (usize, Vec<f64>)) -> Check {
    let th = 10.0;
    let mut w = HistoryWindow::<f64>::new(m);
    let mut mirror: VecDeque<f64> = VecDeque::new();
    for (t, &g) in snrs.iter().enumerate() {
        let before = alignment_accuracy(&w, th);
        let evicts_failure = w.len() == m && w.records().next().is_some_and(|r| !r.success);
        w.push(t, (t % 7, t % 5), g, 0.0, th);
        mirror.push_back(g);
        if mirror.len() > m {
            mirror.pop_front();
        }
        let xi = alignment_accuracy(&w, th);
        prop_assert!((0.0..=1.0).contains(&xi));
        prop_assert!(w.len() <= m);
        let stored: Vec<f64> = w.records().map(|r| r.snr).collect();
        prop_assert_eq!(&stored, &mirror.iter().copied().collect::<Vec<_>>());
        let frames: Vec<usize> = w.records().map(|r| r.frame).collect();
        prop_assert!(frames.windows(2).all(|f| f[1] == f[0] + 1));
        if evicts_failure && g >= th {
            prop_assert!(xi >= before);
        }
    }
    Ok(())
}

// -------------------------------------------------------------- select

fn axis_history(len: usize) -> impl Strategy<Value = AxisInput> {
    (2usize..=10).prop_flat_map(move |n| {
        (prop::collection::vec(0..len, n), prop::collection::vec(prop_oneof![Just(5.0), Just(15.0)], n))
    })
}

pub fn eetbf_inputs() -> impl Strategy<Value = EetbfInput> {
    (1usize..=16, 1usize..=16)
        .prop_flat_map(|(n_h, n_v)| (Just(n_h), Just(n_v), axis_history(n_h), axis_history(n_v), any::<bool>()))
}

fn check_policy_shape(p: &BeamPolicy, n_h: usize, n_v: usize) -> Check {
    prop_assert!(p.beams.iter().all(|&(i, j)| i < n_h && j < n_v));
    let mut seen = p.beams.clone();
    seen.sort_unstable();
    seen.dedup();
    prop_assert_eq!(seen.len(), p.beams.len());
    Ok(())
}

/// Directional policies are in bounds, duplicate-free, contiguous per axis
/// and exactly the product of their axis sets, no larger than the span
/// bound.
pub fn check_eetbf_policy((n_h, n_v, (hi, hs), (vi, vs), pre): EetbfInput) -> Check {
    let cb = BeamCodebook::<f64>::downward(n_h, n_v).unwrap();
    let h = AxisHistory::new(hi.clone(), hs.clone()).unwrap();
    let v = AxisHistory::new(vi.clone(), vs.clone()).unwrap();
    let rule = if pre { CenterRule::PreIncrement } else { CenterRule::FirstSuccess };
    let Ok(p) = eetbf_bt(&h, &v, &cb, 10.0, rule) else {
        return Ok(());
    };
    check_policy_shape(&p, n_h, n_v)?;
    prop_assert!(policy_is_contiguous(&p));
    prop_assert_eq!(p.len(), p.h_indexes.len() * p.v_indexes.len());
    let bound = |idx: &[usize], snr: &[f64]| {
        let max_d = idx.windows(2).map(|w| w[1].abs_diff(w[0])).max().unwrap_or(0);
        let span = snr.len() - (0..snr.len()).rev().find(|&k| snr[k] > 10.0).unwrap_or(0);
        span * max_d + 1
    };
    prop_assert!(p.h_indexes.len() <= 2 * bound(&hi, &hs));
    prop_assert!(p.v_indexes.len() <= 2 * bound(&vi, &vs));
    let one_sided = |d: Direction| d != Direction::Bidirectional;
    if one_sided(p.h_direction) && one_sided(p.v_direction) {
        prop_assert!(p.len() <= bound(&hi, &hs) * bound(&vi, &vs));
    }
    Ok(())
}

pub fn baseline_inputs() -> impl Strategy<Value = (usize, usize, usize, usize, usize, u64)> {
    (1usize..=16, 1usize..=16)
        .prop_flat_map(|(n_h, n_v)| (Just(n_h), Just(n_v), 0..n_h, 0..n_v, 1usize..=300, any::<u64>()))
}

pub fn check_baseline_policies((n_h, n_v, i, j, n, seed): (usize, usize, usize, usize, usize, u64)) -> Check {
    let cb = BeamCodebook::<f64>::downward(n_h, n_v).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ex = exhaustive_policy(&cb);
    check_policy_shape(&ex, n_h, n_v)?;
    prop_assert_eq!(ex.len(), n_h * n_v);
    let rnd = random_policy(&cb, n, &mut rng);
    check_policy_shape(&rnd, n_h, n_v)?;
    prop_assert_eq!(rnd.len(), n.min(n_h * n_v));
    let lin = linear_policy(&cb, (i, j), 5);
    check_policy_shape(&lin, n_h, n_v)?;
    prop_assert!(policy_is_contiguous(&lin));
    prop_assert_eq!(lin.len(), 5.min(n_h) * 5.min(n_v));
    Ok(())
}

pub fn direction_inputs() -> impl Strategy<Value = (Vec<i64>, i64, usize, usize)> {
    (prop::collection::vec(-20i64..=20, 1..10), 1i64..50, 0usize..64, 0usize..40)
}

/// The direction tag depends only on the signs of the differences.
pub fn check_direction_scaling((diffs, c, center, width): (Vec<i64>, i64, usize, usize)) -> Check {
    let scaled: Vec<i64> = diffs.iter().map(|d| d * c).collect();
    let (_, a) = directional_set(center, width, &diffs, 64);
    let (_, b) = directional_set(center, width, &scaled, 64);
    prop_assert_eq!(a, b);
    let (lo, hi) = (*diffs.iter().min().unwrap(), *diffs.iter().max().unwrap());
    let expect = if lo >= 0 {
        Direction::Forward
    } else if hi < 0 {
        Direction::Backward
    } else {
        Direction::Bidirectional
    };
    prop_assert_eq!(a, expect);
    Ok(())
}

pub fn inversion_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (1e-20..1e-6f64, 1e-5..1.0f64, 0.1..1e4f64, 0.1..1e4f64, 1e-15..1e-9f64)
}

/// Inverting the SNR recovers the channel to machine precision.
pub fn check_inversion((h, p, gh, gv, noise): (f64, f64, f64, f64, f64)) -> Check {
    let g = snr(p, h, gh, gv, noise).unwrap();
    let back = estimate_channel(g, p, gh, gv, noise).unwrap();
    prop_assert!((back - h).abs() <= 4.0 * f64::EPSILON * h, "{} vs {}", back, h);
    Ok(())
}

pub fn prediction_inputs() -> impl Strategy<Value = PredictionInput> {
    (1usize..=8, 1usize..=12).prop_flat_map(|(lags, beams)| {
        let grid = move || prop::collection::vec(prop::collection::vec(0.1..10.0f64, beams), lags);
        let mask = prop::collection::vec(prop::collection::vec(any::<bool>(), beams), lags);
        (grid(), grid(), 0.1..5.0f64, 0.1..5.0f64, Just((0..beams).collect::<Vec<_>>()), mask).prop_flat_map(
            |(x, y, a, b, order, mask)| {
                let zero = |g: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                    g.into_iter()
                        .zip(&mask)
                        .map(|(row, m)| row.into_iter().zip(m).map(|(v, &keep)| if keep { v } else { 0.0 }).collect())
                        .collect()
                };
                (Just(zero(x)), Just(zero(y)), Just(a), Just(b), Just(order).prop_shuffle())
            },
        )
    })
}

/// Predictions are per-beam (permuting beams permutes outputs) and linear
/// in the valid samples for a fixed pattern of missing entries.
pub fn check_prediction((x, y, a, b, perm): PredictionInput) -> Check {
    let beta = 0.95;
    // y shares x's missing pattern
    let y: Vec<Vec<f64>> = x
        .iter()
        .zip(&y)
        .map(|(xr, yr)| xr.iter().zip(yr).map(|(&xv, &yv)| if xv == 0.0 { 0.0 } else { yv }).collect())
        .collect();
    let px = predict_channel(&x, beta).unwrap();
    let py = predict_channel(&y, beta).unwrap();
    let mix: Vec<Vec<f64>> =
        x.iter().zip(&y).map(|(xr, yr)| xr.iter().zip(yr).map(|(&u, &v)| a * u + b * v).collect()).collect();
    let pm = predict_channel(&mix, beta).unwrap();
    for k in 0..px.gains.len() {
        prop_assert_eq!(pm.valid[k], px.valid[k]);
        let expect = a * px.gains[k] + b * py.gains[k];
        prop_assert!((pm.gains[k] - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
    }
    let shuffled: Vec<Vec<f64>> = x.iter().map(|row| perm.iter().map(|&k| row[k]).collect()).collect();
    let ps = predict_channel(&shuffled, beta).unwrap();
    for (pos, &k) in perm.iter().enumerate() {
        prop_assert_eq!(ps.gains[pos], px.gains[k]);
        prop_assert_eq!(ps.valid[pos], px.valid[k]);
    }
    Ok(())
}

pub fn top_beam_inputs() -> impl Strategy<Value = (ChannelEstimate<f64>, usize, usize, f64, f64)> {
    (1usize..=16, 1usize..=16).prop_flat_map(|(n_h, n_v)| {
        let n = n_h * n_v;
        (
            prop::collection::vec(0.0..1.0f64, n),
            prop::collection::vec(any::<bool>(), n),
            Just(n_v),
            1usize..=300,
            0.0..2.0f64,
            0.0..0.5f64,
        )
            .prop_map(|(gains, valid, n_v, n_be, th, dec)| (ChannelEstimate { gains, valid }, n_v, n_be, th, dec))
    })
}

pub fn check_top_beam_size((est, n_v, n_be, th, dec): (ChannelEstimate<f64>, usize, usize, f64, f64)) -> Check {
    let unit = vec![1.0; est.gains.len()];
    if let Ok(p) = init_top_beams(&est, n_v, n_be, 1.0, th, dec, 1.0, &unit) {
        let decodable = (0..est.gains.len()).filter(|&k| est.valid[k] && est.gains[k] >= dec).count();
        prop_assert!(p.len() <= n_be.min(decodable));
        check_policy_shape(&p, est.gains.len() / n_v, n_v)?;
    }
    Ok(())
}

// --------------------------------------------------------------- power

pub fn pa_inputs() -> impl Strategy<Value = (f64, usize)> {
    (-10.0..30.0f64, 1usize..=200)
}

/// Action powers are exactly the `Q` multiples of `P_be / Q`.
pub fn check_action_image((p_be_dbm, q): (f64, usize)) -> Check {
    let s = PaSettings { p_be: dbm_to_watts(p_be_dbm), q_levels: q, ..PaSettings::default() };
    let step = s.p_be / q as f64;
    for a in 1..=q {
        let p = action_to_power(a, &s).unwrap();
        prop_assert!((p - a as f64 * step).abs() <= 4.0 * f64::EPSILON * s.p_be);
        prop_assert!(p <= s.p_be);
    }
    prop_assert_eq!(action_to_power(q, &s).unwrap(), s.p_be);
    prop_assert!(action_to_power(0, &s).is_err() && action_to_power(q + 1, &s).is_err());
    Ok(())
}

pub fn normalize_inputs() -> impl Strategy<Value = (Vec<f64>, f64, f64, usize)> {
    (prop::collection::vec(0.0..2.0f64, 0..6000), 0.0..5.0f64, 1e-4..2.0f64, 0usize..3)
}

/// After normalization the averaged power never exceeds `P_th`.
pub fn check_normalize((powers, p_data, p_th, extra): (Vec<f64>, f64, f64, usize)) -> Check {
    let b = FrameBudget64::default();
    let latency = training_latency(powers.len() + extra, &b);
    let s = PaSettings { p_be: 2.0, p_th, ..PaSettings::default() };
    let n = normalize_total(&powers, p_data, &b, latency, &s);
    prop_assert!(avg_power_of(&n.powers, &b, latency, n.p_data) <= p_th);
    prop_assert!(n.factor > 0.0 && n.factor <= 1.0);
    if n.factor == 1.0 {
        prop_assert_eq!(&n.powers, &powers);
    }
    Ok(())
}

pub fn q_inputs() -> impl Strategy<Value = (usize, usize, Vec<f64>, usize, usize, f64, usize)> {
    (1usize..20, 1usize..25).prop_flat_map(|(s_q, q)| {
        let cells = (s_q + 1) * q;
        (
            Just(s_q),
            Just(q),
            prop::collection::vec(-100i32..100, cells).prop_map(|v| v.into_iter().map(f64::from).collect()),
            0..=s_q,
            1..=q,
            -10.0..10.0f64,
            0..=s_q,
        )
    })
}

fn table(s_q: usize, q: usize, values: &[f64]) -> QTable<f64> {
    let mut t = QTable::new(s_q, q);
    for s in 0..=s_q {
        for a in 1..=q {
            t.set(s, a, values[s * q + a - 1]);
        }
    }
    t
}

/// An update touches one cell only, and the greedy choice ignores a
/// constant added to a whole row.
pub fn check_q_table(
    (s_q, q, values, state, action, reward, next): (usize, usize, Vec<f64>, usize, usize, f64, usize),
) -> Check {
    let settings = PaSettings { delta_th: 0.0, q_levels: q, s_q, ..PaSettings::default() };
    let before = table(s_q, q, &values);
    let mut after = before.clone();
    q_update(&mut after, state, action, reward, next, &settings);
    for s in 0..=s_q {
        for a in 1..=q {
            if (s, a) != (state, action) {
                prop_assert_eq!(after.get(s, a).to_bits(), before.get(s, a).to_bits());
            }
        }
    }
    let mut shifted = before.clone();
    for a in 1..=q {
        shifted.set(state, a, before.get(state, a) + (reward.round() * 8.0));
    }
    prop_assert_eq!(before.best_action(state), shifted.best_action(state));
    let (mut r1, mut r2) = (ChaCha8Rng::seed_from_u64(reward.to_bits()), ChaCha8Rng::seed_from_u64(reward.to_bits()));
    prop_assert_eq!(
        choose_action(&before, state, &settings, &mut r1),
        choose_action(&shifted, state, &settings, &mut r2)
    );
    Ok(())
}

// ----------------------------------------------------------------- sim

prop_compose! {
    pub fn sim_configs()(
        scheme in prop::sample::select(Scheme::ALL.to_vec()),
        n_h in 2usize..=16,
        n_v in 2usize..=16,
        frames in 10usize..=40,
        history in 2usize..=6,
        seed in any::<u64>(),
        speed_kmh in 0.0..30.0f64,
        radius in 5.0..80.0f64,
        t_ti in 1e-3..0.06f64,
        p_th_dbm in 15.0..30.0f64,
        rayleigh in any::<bool>(),
        pa in prop::sample::select(vec![Toggle::Auto, Toggle::On, Toggle::Off]),
        top_init in any::<bool>(),
        xi_th in 0.0..1.0f64,
    ) -> SimConfig64 {
        let mut c = SimConfig64 {
            scheme,
            codebook_h: n_h,
            codebook_v: n_v,
            frames,
            history,
            seed,
            speed: speed_kmh / 3.6,
            radius,
            fading: if rayleigh { FadingModel::Rayleigh } else { FadingModel::Deterministic },
            power_control: pa,
            truncate: Toggle::On,
            top_init,
            xi_th,
            random_beams: 40,
            ..Default::default()
        };
        c.budget.t_ti = t_ti;
        c.pa.p_th = dbm_to_watts(p_th_dbm);
        c
    }
}

/// Power caps, the latency cap, warm-up behavior and the accuracy recount
/// hold on every frame, and the user never leaves the disc.
pub fn check_sim_frames(config: SimConfig64) -> Check {
    let mut sim = Simulator::new(config.clone()).unwrap();
    let p_be = config.pa.p_be;
    let fits = config.codebook_h * config.codebook_v <= beamtrain::select::max_training_beams(&config.budget);
    let mut recount: VecDeque<f64> = VecDeque::new();
    for t in 0..config.frames {
        let rec = sim.run_frame();
        prop_assert!(rec.beam_power <= p_be, "C2 at frame {}", t);
        prop_assert!(rec.avg_power <= config.pa.p_th, "C3 at frame {}", t);
        prop_assert!(rec.latency <= config.budget.t_ti, "C4 at frame {}", t);
        prop_assert!((0.0..=1.0).contains(&rec.accuracy));
        let hits = recount.iter().filter(|&&g| g >= config.gamma_th).count();
        let expect = if recount.is_empty() { 0.0 } else { hits as f64 / recount.len() as f64 };
        prop_assert_eq!(rec.accuracy, expect, "accuracy at frame {}", t);
        recount.push_back(rec.snr);
        if recount.len() > config.history {
            recount.pop_front();
        }
        if config.scheme == Scheme::Eetbf && t < config.history && fits {
            prop_assert_eq!(rec.n_beams, config.codebook_h * config.codebook_v);
            prop_assert_eq!(rec.beam_power, p_be);
        }
        sim.step_user();
        prop_assert!(sim.user().horizontal_distance() <= config.radius * (1.0 + 1e-12));
    }
    let v = sim.violations();
    prop_assert_eq!(v.c3, 0);
    prop_assert_eq!(v.c4, 0);
    Ok(())
}

/// Identical configurations give identical runs, also when run
/// concurrently.
pub fn check_determinism(config: SimConfig64) -> Check {
    let a = beamtrain::run_sim(config.clone()).unwrap();
    let (b, c) = std::thread::scope(|s| {
        let hb = s.spawn(|| beamtrain::run_sim(config.clone()).unwrap());
        let hc = s.spawn(|| beamtrain::run_sim(config.clone()).unwrap());
        (hb.join().unwrap(), hc.join().unwrap())
    });
    prop_assert_eq!(&a, &b);
    prop_assert_eq!(&a, &c);
    Ok(())
}
