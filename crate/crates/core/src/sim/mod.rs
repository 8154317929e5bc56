//! Frame-level simulation: user mobility, the per-frame training loop and
//! whole-run management.

mod config;
mod engine;
mod user;

pub use config::{SimConfig, Toggle};
pub use engine::{run_sim, steady_window, summarize, RunResult, Simulator, Summary, Violations};
pub use user::{step_user, UserState};

/// Fraction of trailing frames used for steady-state statistics.
pub const STEADY_STATE_FRACTION: f64 = 0.5;
