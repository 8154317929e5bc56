//! Energy-efficient terahertz beamforming training.
//!
//! The crate models a THz base station that must find the best of a grid of
//! 3D beams for a moving user every transmission interval. It provides the
//! physical models ([`phys`]), the protocol accounting ([`metrics`]), beam
//! candidate selection ([`select`]), Q-learning training-power assignment
//! ([`power`]) and a frame simulator ([`sim`]).
//!
//! Every model is generic over the scalar type through [`Real`]; the `*64`
//! aliases below fix it to `f64`, which is what the simulator normally uses.
//!
//! ```
//! use beamtrain::{run_sim, SimConfig64};
//!
//! let config = SimConfig64 { frames: 20, codebook_h: 8, codebook_v: 8, ..Default::default() };
//! let result = run_sim(config).unwrap();
//! assert_eq!(result.records.len(), 20);
//! ```

// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metrics;
pub mod phys;
pub mod power;
pub mod real;
pub mod select;
pub mod sim;

pub use error::{Error, Result};
pub use metrics::{BeamIndex, FeedbackModel, FrameBudget};
pub use real::Real;
pub use select::{CenterRule, Scheme};
pub use sim::{run_sim, RunResult, SimConfig, Simulator, Toggle};

pub type AntennaConfig64 = phys::AntennaConfig<f64>;
pub type BeamCodebook64 = phys::BeamCodebook<f64>;
pub type ChannelParams64 = phys::ChannelParams<f64>;
pub type FrameBudget64 = metrics::FrameBudget<f64>;
pub type HistoryWindow64 = metrics::HistoryWindow<f64>;
pub type MetricRecord64 = metrics::MetricRecord<f64>;
pub type PaSettings64 = power::PaSettings<f64>;
pub type QTable64 = power::QTable<f64>;
pub type SimConfig64 = sim::SimConfig<f64>;
pub type RunResult64 = sim::RunResult<f64>;
pub type Simulator64 = sim::Simulator<f64>;
