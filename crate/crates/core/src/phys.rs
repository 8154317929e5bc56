//! Physical-layer models: array beamwidth and gain, the THz spreading plus
//! molecular-absorption path gain, molecular noise, BS/user geometry and
//! small-scale fading.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::real::{boltzmann, speed_of_light, wrap_angle, Real};

/// Beamwidth coefficient of a uniform array, in units of `pi * d_t / N`.
const BEAMWIDTH_COEFF: f64 = 1.772;

/// Representative absorption coefficients over 0.1-1 THz, one
/// `frequency_hz coefficient_per_m` pair per line.
pub const DEFAULT_ABSORPTION: &str = include_str!("../data/absorption_default.txt");

/// Beamwidth (rad) of a beam formed by `n_elements` antennas along one axis.
pub fn beamwidth<T: Real>(n_elements: usize, d_t: T) -> Result<T> {
    if n_elements == 0 {
        return Err(invalid("n_elements", "must be at least 1"));
    }
    if !(d_t > T::zero()) {
        return Err(invalid("d_t", "broadening factor must be positive"));
    }
    Ok(T::lit(BEAMWIDTH_COEFF) * T::PI() * d_t / T::from_count(n_elements))
}

/// Mainlobe gain of a beam of the given width.
#[inline]
pub fn mainlobe_gain<T: Real>(beamwidth: T) -> T {
    T::TAU() / beamwidth
}

/// Flat-top beam gain: `2pi/width` when the wrapped offset between beam
/// direction and boresight is within half a beamwidth, `eps` otherwise.
pub fn beam_gain<T: Real>(beam_direction: T, beamwidth: T, boresight: T, eps: T) -> T {
    let offset = wrap_angle(beam_direction - boresight).abs();
    if offset <= beamwidth / T::lit(2.0) {
        mainlobe_gain(beamwidth)
    } else {
        eps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaConfig<T> {
    pub n_h: usize,
    pub n_v: usize,
    pub d_t: T,
    pub eps_sidelobe: T,
}

impl<T: Real> Default for AntennaConfig<T> {
    fn default() -> Self {
        Self { n_h: 64, n_v: 64, d_t: T::one(), eps_sidelobe: T::lit(0.1) }
    }
}

impl<T: Real> AntennaConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_h == 0 || self.n_v == 0 {
            return Err(invalid("antenna.n_h/n_v", "element counts must be at least 1"));
        }
        if !(self.d_t > T::zero()) {
            return Err(invalid("antenna.d_t", "must be positive"));
        }
        if !(self.eps_sidelobe > T::zero() && self.eps_sidelobe < T::one()) {
            return Err(invalid("antenna.eps_sidelobe", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn total_elements(&self) -> usize {
        self.n_h * self.n_v
    }

    pub fn beamwidth_h(&self) -> Result<T> {
        beamwidth(self.n_h, self.d_t)
    }

    pub fn beamwidth_v(&self) -> Result<T> {
        beamwidth(self.n_v, self.d_t)
    }
}

/// Which axis of the codebook an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Uniform angular grid of 3D beams. Beam `(i, j)` points at azimuth
/// `h_directions[i]` and elevation `v_directions[j]`; the mainlobes tile
/// each axis span without overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook<T> {
    pub h_directions: Vec<T>,
    pub v_directions: Vec<T>,
    pub theta_h: T,
    pub theta_v: T,
    pub azimuth_start: T,
    pub azimuth_span: T,
    pub elevation_start: T,
    pub elevation_span: T,
}

impl<T: Real> BeamCodebook<T> {
    /// Tiles `[start, start + span)` on each axis with `n` equal beams.
    pub fn uniform(
        n_h: usize,
        n_v: usize,
        azimuth_start: T,
        azimuth_span: T,
        elevation_start: T,
        elevation_span: T,
    ) -> Result<Self> {
        if n_h == 0 || n_v == 0 {
            return Err(invalid("codebook.n_h/n_v", "beam counts must be at least 1"));
        }
        if !(azimuth_span > T::zero() && azimuth_span <= T::TAU()) {
            return Err(invalid("codebook.azimuth_span", "must lie in (0, 2pi]"));
        }
        if !(elevation_span > T::zero() && elevation_span <= T::PI()) {
            return Err(invalid("codebook.elevation_span", "must lie in (0, pi]"));
        }
        let theta_h = azimuth_span / T::from_count(n_h);
        let theta_v = elevation_span / T::from_count(n_v);
        let half = T::lit(0.5);
        let h_directions = (0..n_h).map(|k| azimuth_start + (T::from_count(k) + half) * theta_h).collect();
        let v_directions = (0..n_v).map(|k| elevation_start + (T::from_count(k) + half) * theta_v).collect();
        Ok(Self {
            h_directions,
            v_directions,
            theta_h,
            theta_v,
            azimuth_start,
            azimuth_span,
            elevation_start,
            elevation_span,
        })
    }

    /// Full azimuth circle and the downward elevation quadrant `[pi/2, pi)`.
    pub fn downward(n_h: usize, n_v: usize) -> Result<Self> {
        Self::uniform(n_h, n_v, -T::PI(), T::TAU(), T::FRAC_PI_2(), T::FRAC_PI_2())
    }

    pub fn n_h(&self) -> usize {
        self.h_directions.len()
    }

    pub fn n_v(&self) -> usize {
        self.v_directions.len()
    }

    pub fn len(&self) -> usize {
        self.n_h() * self.n_v()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_len(&self, axis: Axis) -> usize {
        match axis {
            Axis::Horizontal => self.n_h(),
            Axis::Vertical => self.n_v(),
        }
    }

    pub fn beamwidth(&self, axis: Axis) -> T {
        match axis {
            Axis::Horizontal => self.theta_h,
            Axis::Vertical => self.theta_v,
        }
    }

    fn directions(&self, axis: Axis) -> &[T] {
        match axis {
            Axis::Horizontal => &self.h_directions,
            Axis::Vertical => &self.v_directions,
        }
    }

    fn start(&self, axis: Axis) -> T {
        match axis {
            Axis::Horizontal => self.azimuth_start,
            Axis::Vertical => self.elevation_start,
        }
    }

    /// Row-major flat index of beam `(i, j)`.
    #[inline]
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.n_v() + j
    }

    #[inline]
    pub fn unflat(&self, k: usize) -> (usize, usize) {
        (k / self.n_v(), k % self.n_v())
    }

    /// Mainlobe gain of beam `(i, j)`, the product of both axis gains.
    pub fn nominal_gain(&self) -> T {
        mainlobe_gain(self.theta_h) * mainlobe_gain(self.theta_v)
    }

    /// Gain of every beam on one axis towards `boresight`.
    pub fn axis_gains(&self, axis: Axis, boresight: T, eps: T) -> Vec<T> {
        let width = self.beamwidth(axis);
        self.directions(axis).iter().map(|&dir| beam_gain(dir, width, boresight, eps)).collect()
    }

    /// Gain of a widened beam covering the contiguous index range `[lo, hi)`
    /// on one axis.
    pub fn sector_gain(&self, axis: Axis, lo: usize, hi: usize, boresight: T, eps: T) -> T {
        debug_assert!(lo < hi && hi <= self.axis_len(axis));
        let width = self.beamwidth(axis);
        let span = T::from_count(hi - lo) * width;
        let center = self.start(axis) + T::from_count(lo) * width + span / T::lit(2.0);
        beam_gain(center, span, boresight, eps)
    }
}

/// Absorption coefficient table, linearly interpolated in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable<T> {
    entries: Vec<(T, T)>,
}

impl<T: Real> AbsorptionTable<T> {
    pub fn new(entries: Vec<(T, T)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::AbsorptionTable { line: 0, reason: "no entries".into() });
        }
        for (k, &(f, coeff)) in entries.iter().enumerate() {
            if !(coeff >= T::zero()) || !coeff.is_finite() {
                return Err(Error::AbsorptionTable {
                    line: k + 1,
                    reason: "coefficient must be finite and non-negative".into(),
                });
            }
            if !f.is_finite() || (k > 0 && !(f > entries[k - 1].0)) {
                return Err(Error::AbsorptionTable {
                    line: k + 1,
                    reason: "frequencies must be strictly increasing".into(),
                });
            }
        }
        Ok(Self { entries })
    }

    /// A frequency-independent coefficient.
    pub fn constant(coeff: T) -> Result<Self> {
        Self::new(vec![(T::zero(), coeff)])
    }

    /// Parses `frequency_hz coefficient_per_m` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(T, T)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::AbsorptionTable { line: n + 1, reason: reason.into() };
            let mut fields = line.split_whitespace();
            let (Some(f), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(bad("expected two fields"));
            };
            let f: f64 = f.parse().map_err(|_| bad("unparsable frequency"))?;
            let c: f64 = c.parse().map_err(|_| bad("unparsable coefficient"))?;
            if !(c >= 0.0) || !c.is_finite() {
                return Err(bad("coefficient must be finite and non-negative"));
            }
            if !f.is_finite() || entries.last().is_some_and(|&(prev, _)| !(T::lit(f) > prev)) {
                return Err(bad("frequencies must be strictly increasing"));
            }
            entries.push((T::lit(f), T::lit(c)));
        }
        Self::new(entries)
    }

    pub fn default_table() -> Self {
        Self::parse(DEFAULT_ABSORPTION).expect("bundled absorption table is well formed")
    }

    pub fn entries(&self) -> &[(T, T)] {
        &self.entries
    }

    /// Coefficient at `freq` (1/m); clamps outside the tabulated range.
    pub fn lookup(&self, freq: T) -> T {
        let first = self.entries[0];
        let last = self.entries[self.entries.len() - 1];
        if freq <= first.0 {
            return first.1;
        }
        if freq >= last.0 {
            return last.1;
        }
        let upper = self.entries.partition_point(|&(f, _)| f <= freq);
        let (f0, k0) = self.entries[upper - 1];
        let (f1, k1) = self.entries[upper];
        if freq == f0 {
            return k0;
        }
        k0 + (k1 - k0) * (freq - f0) / (f1 - f0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams<T> {
    /// Carrier frequency (Hz).
    pub freq: T,
    pub absorption: AbsorptionTable<T>,
    /// System bandwidth (Hz).
    pub bandwidth: T,
    /// Thermal noise spectral density (W/Hz).
    pub thermal_floor: T,
    /// Additive hardware noise power (W).
    pub noise_figure_power: T,
    /// Reference temperature (K).
    pub ref_temperature: T,
}

impl<T: Real> Default for ChannelParams<T> {
    fn default() -> Self {
        Self {
            freq: T::lit(0.3e12),
            absorption: AbsorptionTable::default_table(),
            bandwidth: T::lit(1e9),
            // -174 dBm/Hz
            thermal_floor: T::lit(10f64.powf(-17.4) * 1e-3),
            noise_figure_power: T::zero(),
            ref_temperature: T::lit(290.0),
        }
    }
}

impl<T: Real> ChannelParams<T> {
    /// Validates the parameters and returns human-readable warnings for
    /// values that are accepted but outside the modelled THz band.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.freq > T::zero()) {
            return Err(invalid("channel.freq_hz", "must be positive"));
        }
        if !(self.bandwidth > T::zero()) {
            return Err(invalid("channel.bandwidth_hz", "must be positive"));
        }
        if !(self.thermal_floor >= T::zero()) {
            return Err(invalid("channel.n0_dbm_hz", "noise density must be non-negative"));
        }
        if !(self.noise_figure_power >= T::zero()) {
            return Err(invalid("channel.noise_figure_w", "must be non-negative"));
        }
        if !(self.ref_temperature >= T::zero()) {
            return Err(invalid("channel.temperature_k", "must be non-negative"));
        }
        let mut warnings = Vec::new();
        if self.freq < T::lit(0.1e12) || self.freq > T::lit(1e12) {
            warnings.push(format!("channel.freq_hz = {} lies outside the modelled 0.1-1 THz band", self.freq));
        }
        Ok(warnings)
    }

    pub fn absorption_coeff(&self) -> T {
        self.absorption.lookup(self.freq)
    }

    /// Total noise power (W): `W * (N0 + molecular) + N_NF`.
    pub fn noise_power(&self, d: T) -> T {
        self.bandwidth * (self.thermal_floor + molecular_noise(self, d)) + self.noise_figure_power
    }
}

/// `rho * (c / (4 pi f d))^2 * exp(-K(f) d)`.
pub fn path_gain<T: Real>(params: &ChannelParams<T>, d: T, rho: T) -> Result<T> {
    if !(d > T::zero()) {
        return Err(invalid("d", "distance must be positive"));
    }
    let spreading = speed_of_light::<T>() / (T::lit(4.0) * T::PI() * params.freq * d);
    Ok(rho * spreading * spreading * (-params.absorption_coeff() * d).exp())
}

/// Molecular re-radiation noise density (W/Hz): `k_B T0 (1 - exp(-K d))`.
pub fn molecular_noise<T: Real>(params: &ChannelParams<T>, d: T) -> T {
    let kd = params.absorption_coeff() * d.max(T::zero());
    boltzmann::<T>() * params.ref_temperature * -(-kd).exp_m1()
}

/// BS at `(0, 0, bs_height)`, user at `user_pos`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry<T> {
    pub bs_height: T,
    pub user_pos: [T; 3],
}

impl<T: Real> Geometry<T> {
    pub fn distance(&self) -> T {
        let [x, y, z] = self.user_pos;
        let dz = self.bs_height - z;
        (x * x + y * y + dz * dz).sqrt()
    }

    /// `(azimuth, elevation)` of the user as seen from the BS.
    pub fn boresight(&self) -> (T, T) {
        boresight(self)
    }
}

/// Quadrant-correct boresight angles, `atan2(y, x)` and `atan2(d, z - h)`.
pub fn boresight<T: Real>(geo: &Geometry<T>) -> (T, T) {
    let [x, y, z] = geo.user_pos;
    (y.atan2(x), geo.distance().atan2(z - geo.bs_height))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FadingModel {
    #[default]
    Deterministic,
    Rayleigh,
}

impl FadingModel {
    pub fn as_str(self) -> &'static str {
        match self {
            FadingModel::Deterministic => "deterministic",
            FadingModel::Rayleigh => "rayleigh",
        }
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deterministic" => Ok(Self::Deterministic),
            "rayleigh" => Ok(Self::Rayleigh),
            other => Err(invalid("fading", format!("unknown fading model `{other}`"))),
        }
    }
}

/// Small-scale power fading sample with unit mean.
pub fn sample_fading<T: Real, R: Rng + ?Sized>(model: FadingModel, rng: &mut R) -> T {
    match model {
        FadingModel::Deterministic => T::one(),
        // |h|^2 of a unit-power circular Gaussian is Exp(1)
        FadingModel::Rayleigh => {
            let draw: f64 = Exp1.sample(rng);
            T::lit(draw)
        }
    }
}
