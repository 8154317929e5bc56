use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::metrics::FrameBudget;
use crate::phys::{AntennaConfig, BeamCodebook, ChannelParams, FadingModel};
use crate::power::PaSettings;
use crate::real::{db_to_linear, Real};
use crate::select::{CenterRule, Scheme};

/// Tri-state switch whose `Auto` value depends on the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Toggle {
    #[default]
    Auto,
    On,
    Off,
}

impl Toggle {
    pub fn as_str(self) -> &'static str {
        match self {
            Toggle::Auto => "auto",
            Toggle::On => "on",
            Toggle::Off => "off",
        }
    }

    /// `Auto` resolves to on for the proposed scheme and off for baselines.
    pub fn resolve(self, scheme: Scheme) -> bool {
        match self {
            Toggle::Auto => scheme == Scheme::Eetbf,
            Toggle::On => true,
            Toggle::Off => false,
        }
    }
}

impl fmt::Display for Toggle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Toggle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Toggle::Auto),
            "on" | "true" => Ok(Toggle::On),
            "off" | "false" => Ok(Toggle::Off),
            other => Err(invalid("toggle", format!("expected auto, on or off, got `{other}`"))),
        }
    }
}

/// Everything one simulation run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub scheme: Scheme,
    pub frames: usize,
    pub seed: u64,

    pub antenna: AntennaConfig<T>,
    /// Beams per axis of the codebook.
    pub codebook_h: usize,
    pub codebook_v: usize,
    pub azimuth_start: T,
    pub azimuth_span: T,
    pub elevation_start: T,
    pub elevation_span: T,

    pub channel: ChannelParams<T>,
    pub fading: FadingModel,
    pub budget: FrameBudget<T>,

    /// SNR threshold for a successful training (linear).
    pub gamma_th: T,
    /// Decodability threshold for every trained beam (linear).
    pub gamma_dec: T,
    /// Alignment accuracy below which the full codebook is retrained.
    pub xi_th: T,
    /// History window size `M`.
    pub history: usize,

    pub pa: PaSettings<T>,
    pub power_control: Toggle,
    pub truncate: Toggle,
    pub center_rule: CenterRule,
    /// Decay factor of the channel predictor.
    pub beta: T,
    /// Rank truncated full sweeps by predicted channel quality.
    pub top_init: bool,

    pub radius: T,
    pub bs_height: T,
    pub user_height: T,
    /// User speed (m/s).
    pub speed: T,

    pub random_beams: usize,
    pub linear_window: usize,
    pub tree_branching: usize,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            scheme: Scheme::Eetbf,
            frames: 2000,
            seed: 1,
            antenna: AntennaConfig::default(),
            codebook_h: 40,
            codebook_v: 40,
            azimuth_start: -T::PI(),
            azimuth_span: T::TAU(),
            elevation_start: T::FRAC_PI_2(),
            elevation_span: T::FRAC_PI_2(),
            channel: ChannelParams::default(),
            fading: FadingModel::Deterministic,
            budget: FrameBudget::default(),
            gamma_th: db_to_linear(T::lit(10.0)),
            gamma_dec: db_to_linear(T::zero()),
            xi_th: T::lit(0.7),
            history: 10,
            pa: PaSettings::default(),
            power_control: Toggle::Auto,
            truncate: Toggle::Auto,
            center_rule: CenterRule::FirstSuccess,
            beta: T::lit(0.95),
            top_init: true,
            radius: T::lit(50.0),
            bs_height: T::lit(10.0),
            user_height: T::lit(1.5),
            speed: T::lit(1.8 / 3.6),
            random_beams: 1000,
            linear_window: 5,
            tree_branching: 4,
        }
    }
}

impl<T: Real> SimConfig<T> {
    /// Checks every invariant; returns warnings for accepted but unusual
    /// values.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.frames == 0 {
            return Err(invalid("frames", "must be at least 1"));
        }
        self.antenna.validate()?;
        self.codebook()?;
        let warnings = self.channel.validate()?;
        self.budget.validate()?;
        self.pa.validate()?;
        if !(self.gamma_th > T::zero()) {
            return Err(invalid("thresholds.gamma_th_db", "must be finite"));
        }
        if !(self.gamma_dec >= T::zero()) {
            return Err(invalid("thresholds.gamma_dec_db", "must be finite"));
        }
        if !(self.xi_th >= T::zero() && self.xi_th <= T::one()) {
            return Err(invalid("thresholds.xi_th", "must lie in [0, 1]"));
        }
        if self.history < 2 {
            return Err(invalid("history.m", "must be at least 2"));
        }
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return Err(invalid("predict.beta", "must lie in (0, 1)"));
        }
        if !(self.radius > T::zero()) {
            return Err(invalid("geometry.radius_m", "must be positive"));
        }
        if !(self.speed >= T::zero()) {
            return Err(invalid("user.speed_kmh", "must be non-negative"));
        }
        if self.bs_height == self.user_height {
            return Err(invalid("geometry.bs_height_m", "must differ from the user height"));
        }
        if self.random_beams == 0 {
            return Err(invalid("baseline.random_beams", "must be at least 1"));
        }
        if self.linear_window == 0 {
            return Err(invalid("baseline.linear_window", "must be at least 1"));
        }
        let root = (self.tree_branching as f64).sqrt().round() as usize;
        if self.tree_branching < 4 || root * root != self.tree_branching {
            return Err(invalid("baseline.tree_branching", "must be a perfect square of at least 4"));
        }
        Ok(warnings)
    }

    pub fn codebook(&self) -> Result<BeamCodebook<T>> {
        BeamCodebook::uniform(
            self.codebook_h,
            self.codebook_v,
            self.azimuth_start,
            self.azimuth_span,
            self.elevation_start,
            self.elevation_span,
        )
    }

    pub fn power_control_enabled(&self) -> bool {
        self.power_control.resolve(self.scheme)
    }

    pub fn truncation_enabled(&self) -> bool {
        self.truncate.resolve(self.scheme)
    }
}
