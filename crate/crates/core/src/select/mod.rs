//! Beam-candidate policies: the history-driven directional search, channel
//! prediction with top-ranked initialization, and the benchmark searches.

mod baseline;
mod directional;
mod estimate;

use std::fmt;
use std::str::FromStr;

pub use baseline::{
    binary_search, bisect_axis, exhaustive_policy, iterative_search, linear_policy, random_policy, SearchOutcome,
    Sector,
};
pub use directional::{axis_diffs, directional_set, eetbf_bt, span_params, CenterRule, SpanParams};
pub use estimate::{
    estimate_channel, estimates_from_captures, init_top_beams, max_training_beams, predict_channel, ChannelEstimate,
};

use crate::error::{invalid, Error, Result};
use crate::metrics::{BeamIndex, FeedbackModel, HistoryWindow};
use crate::phys::Axis;
use crate::real::Real;

/// Beam training scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Eetbf,
    Exhaustive,
    Random,
    Iterative,
    Linear,
    Binary,
}

impl Scheme {
    pub const ALL: [Scheme; 6] =
        [Scheme::Eetbf, Scheme::Exhaustive, Scheme::Random, Scheme::Iterative, Scheme::Linear, Scheme::Binary];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Eetbf => "eetbf",
            Scheme::Exhaustive => "exhaustive",
            Scheme::Random => "random",
            Scheme::Iterative => "iterative",
            Scheme::Linear => "linear",
            Scheme::Binary => "binary",
        }
    }

    /// Iterative, linear and binary searches report after every probe.
    pub fn feedback(self) -> FeedbackModel {
        match self {
            Scheme::Eetbf | Scheme::Exhaustive | Scheme::Random => FeedbackModel::Once,
            Scheme::Iterative | Scheme::Linear | Scheme::Binary => FeedbackModel::PerBeam,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

/// How an axis index set was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Bidirectional,
    Exhaustive,
    Other,
}

/// Candidate beams for one frame, in training order.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPolicy {
    pub h_indexes: Vec<usize>,
    pub v_indexes: Vec<usize>,
    pub h_direction: Direction,
    pub v_direction: Direction,
    pub beams: Vec<BeamIndex>,
}

impl BeamPolicy {
    /// Cartesian span of two axis sets, row-major.
    pub fn span(h: Vec<usize>, h_direction: Direction, v: Vec<usize>, v_direction: Direction) -> Self {
        let beams = h.iter().flat_map(|&i| v.iter().map(move |&j| (i, j))).collect();
        Self { h_indexes: h, v_indexes: v, h_direction, v_direction, beams }
    }

    /// An arbitrary beam list; the axis sets are its sorted projections.
    pub fn explicit(beams: Vec<BeamIndex>, direction: Direction) -> Self {
        let mut h: Vec<usize> = beams.iter().map(|b| b.0).collect();
        let mut v: Vec<usize> = beams.iter().map(|b| b.1).collect();
        h.sort_unstable();
        h.dedup();
        v.sort_unstable();
        v.dedup();
        Self { h_indexes: h, v_indexes: v, h_direction: direction, v_direction: direction, beams }
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    /// Keeps the first `n` beams.
    pub fn truncate(&mut self, n: usize) {
        if self.beams.len() > n {
            let mut beams = std::mem::take(&mut self.beams);
            beams.truncate(n);
            *self = Self::explicit(beams, Direction::Other);
        }
    }
}

/// Optimal indexes of one axis over the history window, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisHistory<T> {
    pub optimal_indexes: Vec<usize>,
    pub snrs: Vec<T>,
}

impl<T: Real> AxisHistory<T> {
    pub fn new(optimal_indexes: Vec<usize>, snrs: Vec<T>) -> Result<Self> {
        if optimal_indexes.len() != snrs.len() {
            return Err(invalid("axis_history", "index and SNR lists differ in length"));
        }
        Ok(Self { optimal_indexes, snrs })
    }

    pub fn from_window(window: &HistoryWindow<T>, axis: Axis) -> Self {
        let optimal_indexes = window
            .records()
            .map(|r| match axis {
                Axis::Horizontal => r.beam.0,
                Axis::Vertical => r.beam.1,
            })
            .collect();
        let snrs = window.records().map(|r| r.snr).collect();
        Self { optimal_indexes, snrs }
    }

    pub fn len(&self) -> usize {
        self.optimal_indexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.optimal_indexes.is_empty()
    }
}
