//! Randomized comparisons of the optimized routines against the brute-force
//! references in [`super::oracles`]. Every driver returns the first
//! disagreement as a message.

use beamtrain::error::Error;
use beamtrain::metrics::pick_optimal;
use beamtrain::select::{axis_diffs, binary_search, eetbf_bt, init_top_beams, AxisHistory, ChannelEstimate};
use beamtrain::{BeamCodebook64, BeamIndex, CenterRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracles::{self, coarse, AxisOutcome};

pub type Outcome = Result<(), String>;
type Driver = fn(usize) -> Outcome;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn dims<R: Rng>(rng: &mut R) -> (usize, usize) {
    (rng.random_range(1..=16), rng.random_range(1..=16))
}

pub fn pick_optimal_agrees(instances: usize) -> Outcome {
    let mut rng = rng(1);
    for case in 0..instances {
        let (n_h, n_v) = dims(&mut rng);
        let mut grid: Vec<(BeamIndex, f64)> =
            (0..n_h).flat_map(|i| (0..n_v).map(move |j| (i, j))).map(|b| (b, 0.0)).collect();
        for cell in grid.iter_mut() {
            cell.1 = coarse(&mut rng, 6);
        }
        // training order is arbitrary
        for k in (1..grid.len()).rev() {
            grid.swap(k, rng.random_range(0..=k));
        }
        let n = rng.random_range(1..=grid.len());
        grid.truncate(n);
        let got = pick_optimal(&grid).map_err(|e| format!("case {case}: {e}"))?;
        let want = oracles::pick_optimal(&grid).expect("grid is non-empty");
        if got != want {
            return Err(format!("case {case}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

fn history<R: Rng>(rng: &mut R, len: usize) -> (Vec<usize>, Vec<f64>) {
    let n = rng.random_range(0..=10);
    let idx = (0..n).map(|_| rng.random_range(0..len)).collect();
    let snr = (0..n).map(|_| if rng.random_bool(0.6) { 15.0 } else { coarse(rng, 2) * 20.0 }).collect();
    (idx, snr)
}

pub fn axis_diffs_agree(instances: usize) -> Outcome {
    let mut rng = rng(2);
    for case in 0..instances {
        let (idx, snr) = history(&mut rng, 16);
        let got = axis_diffs(&AxisHistory::new(idx.clone(), snr).unwrap()).ok();
        let want = oracles::axis_diffs(&idx);
        if got != want {
            return Err(format!("case {case}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

pub fn eetbf_agrees(instances: usize) -> Outcome {
    let mut rng = rng(3);
    let th = 10.0;
    for case in 0..instances {
        let (n_h, n_v) = dims(&mut rng);
        let cb = BeamCodebook64::downward(n_h, n_v).unwrap();
        let (hi, hs) = history(&mut rng, n_h);
        let (vi, vs) = history(&mut rng, n_v);
        let got = eetbf_bt(
            &AxisHistory::new(hi.clone(), hs.clone()).unwrap(),
            &AxisHistory::new(vi.clone(), vs.clone()).unwrap(),
            &cb,
            th,
            CenterRule::FirstSuccess,
        );
        let want = match (oracles::axis_set(&hi, &hs, th, n_h), oracles::axis_set(&vi, &vs, th, n_v)) {
            (AxisOutcome::TooShort, _) | (AxisOutcome::Set(_), AxisOutcome::TooShort) => {
                Err(Error::InsufficientHistory)
            }
            (AxisOutcome::AllFailed, _) | (AxisOutcome::Set(_), AxisOutcome::AllFailed) => Err(Error::AllFailed),
            (AxisOutcome::Set(h), AxisOutcome::Set(v)) => Ok(oracles::eetbf_beams(&h, &v, n_h, n_v)),
        };
        let got = got.map(|p| p.beams);
        if got != want {
            return Err(format!("case {case}: h {hi:?}/{hs:?} v {vi:?}/{vs:?}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

pub fn init_top_beams_agree(instances: usize) -> Outcome {
    let mut rng = rng(4);
    for case in 0..instances {
        let (n_h, n_v) = dims(&mut rng);
        let n = n_h * n_v;
        let est = ChannelEstimate {
            gains: (0..n).map(|_| coarse(&mut rng, 8)).collect(),
            valid: (0..n).map(|_| rng.random_bool(0.8)).collect(),
        };
        let gains: Vec<f64> = (0..n).map(|_| 1.0 + coarse(&mut rng, 3)).collect();
        let n_be = rng.random_range(1..=n + 2);
        let (th, dec) = (coarse(&mut rng, 10), coarse(&mut rng, 4));
        let got = init_top_beams(&est, n_v, n_be, 1.0, th, dec, 1.0, &gains).map(|p| p.beams);
        let want = oracles::init_top_beams(&est, n_v, n_be, 1.0, th, dec, 1.0, &gains);
        if got != want {
            return Err(format!("case {case}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

pub fn binary_search_agrees(instances: usize) -> Outcome {
    let mut rng = rng(5);
    for case in 0..instances {
        let (n_h, n_v) = dims(&mut rng);
        let weights: Vec<Vec<f64>> = (0..n_h).map(|_| (0..n_v).map(|_| coarse(&mut rng, 4)).collect()).collect();
        let score = |s: &beamtrain::select::Sector| oracles::sector_score(&weights, s);
        let got = binary_search(n_h, n_v, score);
        let (best, probes) = oracles::binary_search(n_h, n_v, &score);
        if got.best != best || got.probes[..probes.len()] != probes[..] {
            return Err(format!("case {case}: {:?} vs {best:?}", got.best));
        }
        let extra = &got.probes[probes.len()..];
        let single = beamtrain::select::Sector::beam(best.0, best.1);
        let probed = probes.iter().any(|(s, _)| *s == single);
        if extra.len() != usize::from(!probed) || extra.iter().any(|(s, _)| *s != single) {
            return Err(format!("case {case}: unexpected trailing probes {extra:?}"));
        }
        if got.best_snr != score(&single) {
            return Err(format!("case {case}: best SNR {}", got.best_snr));
        }
    }
    Ok(())
}

pub const ALL: [(&str, Driver); 5] = [
    ("pick_optimal", pick_optimal_agrees),
    ("axis_diffs", axis_diffs_agree),
    ("eetbf_bt", eetbf_agrees),
    ("init_top_beams", init_top_beams_agree),
    ("binary_search", binary_search_agrees),
];
