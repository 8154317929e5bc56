//! `key = value` configuration files layered over built-in defaults.
//!
//! Every key has a textual default. Files and command-line overrides replace
//! the text, which is canonicalized on entry; the simulator configuration is
//! then built from the final texts alone. Printing the texts back therefore
//! yields a file that resolves to the identical configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use beamtrain::phys::{AbsorptionTable, FadingModel};
use beamtrain::real::{db_to_linear, dbm_to_watts};
use beamtrain::{CenterRule, Scheme, SimConfig64, Toggle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Real,
    Count,
    Seed,
    Flag,
    Toggle,
    Scheme,
    Fading,
    CenterRule,
    /// Optional real; empty text means unset.
    OptReal,
    /// Optional filesystem path; empty text means unset.
    Path,
}

struct KeySpec {
    name: &'static str,
    default: &'static str,
    kind: Kind,
}

const fn key(name: &'static str, default: &'static str, kind: Kind) -> KeySpec {
    KeySpec { name, default, kind }
}

/// Recognized keys in echo order.
const KEYS: &[KeySpec] = &[
    key("scheme", "eetbf", Kind::Scheme),
    key("seed", "1", Kind::Seed),
    key("frames", "2000", Kind::Count),
    key("antenna.n_h", "64", Kind::Count),
    key("antenna.n_v", "64", Kind::Count),
    key("antenna.d_t", "1", Kind::Real),
    key("antenna.eps_sidelobe", "0.1", Kind::Real),
    key("codebook.n_h", "40", Kind::Count),
    key("codebook.n_v", "40", Kind::Count),
    key("codebook.azimuth_start_deg", "-180", Kind::Real),
    key("codebook.azimuth_span_deg", "360", Kind::Real),
    key("codebook.elevation_start_deg", "90", Kind::Real),
    key("codebook.elevation_span_deg", "90", Kind::Real),
    key("channel.freq_hz", "300000000000", Kind::Real),
    key("channel.bandwidth_hz", "1000000000", Kind::Real),
    key("channel.n0_dbm_hz", "-174", Kind::Real),
    key("channel.noise_figure_w", "0", Kind::Real),
    key("channel.temperature_k", "290", Kind::Real),
    key("channel.absorption_file", "", Kind::Path),
    key("channel.absorption_coeff", "", Kind::OptReal),
    key("channel.fading", "deterministic", Kind::Fading),
    key("frame.t_ti_s", "0.05", Kind::Real),
    key("frame.t_bt_s", "0.00001", Kind::Real),
    key("frame.t_rq_s", "0.00001", Kind::Real),
    key("frame.t_fb_s", "0.00001", Kind::Real),
    key("frame.t_ac_s", "0.00001", Kind::Real),
    key("thresholds.gamma_th_db", "10", Kind::Real),
    key("thresholds.gamma_dec_db", "0", Kind::Real),
    key("thresholds.xi_th", "0.7", Kind::Real),
    key("history.m", "10", Kind::Count),
    key("pa.enabled", "auto", Kind::Toggle),
    key("pa.p_be_dbm", "15", Kind::Real),
    key("pa.p_th_dbm", "27", Kind::Real),
    key("pa.q_levels", "20", Kind::Count),
    key("pa.s_q", "100", Kind::Count),
    key("pa.delta_th", "0.15", Kind::Real),
    key("pa.eta1", "0.5", Kind::Real),
    key("pa.eta2", "0.5", Kind::Real),
    key("pa.reward_normalize", "true", Kind::Flag),
    key("pa.rmax_global", "false", Kind::Flag),
    key("pa.snr_floor", "true", Kind::Flag),
    key("select.truncate", "auto", Kind::Toggle),
    key("select.center_rule", "first_success", Kind::CenterRule),
    key("predict.beta", "0.95", Kind::Real),
    key("predict.top_init", "true", Kind::Flag),
    key("geometry.radius_m", "50", Kind::Real),
    key("geometry.bs_height_m", "10", Kind::Real),
    key("user.height_m", "1.5", Kind::Real),
    key("user.speed_kmh", "1.8", Kind::Real),
    key("baseline.random_beams", "1000", Kind::Count),
    key("baseline.linear_window", "5", Kind::Count),
    key("baseline.tree_branching", "4", Kind::Count),
    key("summary.steady_fraction", "0.5", Kind::Real),
];

/// Short names accepted in place of the full key.
const ALIASES: &[(&str, &str)] = &[
    ("freq", "channel.freq_hz"),
    ("velocity", "user.speed_kmh"),
    ("radius", "geometry.radius_m"),
    ("t_ti", "frame.t_ti_s"),
];

fn spec(name: &str) -> Option<&'static KeySpec> {
    let name = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, k)| k);
    KEYS.iter().find(|k| k.name == name)
}

/// Where a value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Override(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => f.write_str("default"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Override(flag) => f.write_str(flag),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: expected `key = value`, got `{text}`")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: {key}: cannot parse `{value}`: {reason}")]
    BadValue { origin: Origin, key: String, value: String, reason: String },
    #[error("{origin}: {key}: {reason}")]
    Invalid { origin: Origin, key: String, reason: String },
}

/// The layered key/value texts of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigLayers {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl Default for ConfigLayers {
    fn default() -> Self {
        let values = KEYS.iter().map(|k| (k.name, (k.default.to_string(), Origin::Default))).collect();
        Self { values }
    }
}

impl ConfigLayers {
    /// Defaults overlaid with the file at `path`.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut layers = Self::default();
        layers.apply_text(&text, path)?;
        Ok(layers)
    }

    /// Applies `key = value` lines; blank lines and lines starting with `#`
    /// are skipped. Relative paths resolve against the file's directory.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = Origin::File { path: path.into(), line: n + 1 };
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { origin, text: line.into() });
            };
            let (k, v) = (k.trim(), v.trim());
            let v = match spec(k) {
                Some(s) if s.kind == Kind::Path && !v.is_empty() && Path::new(v).is_relative() => {
                    base.join(v).to_string_lossy().into_owned()
                }
                _ => v.to_string(),
            };
            self.set(k, &v, origin)?;
        }
        Ok(())
    }

    /// Applies a `key=value` override, as given to `--set`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let origin = Origin::Override(format!("--set {assignment}"));
        let Some((k, v)) = assignment.split_once('=') else {
            return Err(ConfigError::Syntax { origin, text: assignment.into() });
        };
        self.set(k.trim(), v.trim(), origin)
    }

    /// Validates and stores one value in canonical form. Relative paths are
    /// taken relative to the working directory.
    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        let Some(spec) = spec(key) else {
            return Err(ConfigError::UnknownKey { origin, key: key.into() });
        };
        let absolute;
        let value = if spec.kind == Kind::Path && !value.is_empty() {
            // absolute, so that the echo loads from any directory
            absolute =
                std::path::absolute(value).map_or_else(|_| value.to_string(), |p| p.to_string_lossy().into_owned());
            absolute.as_str()
        } else {
            value
        };
        let canonical = canonicalize(spec.kind, value).map_err(|reason| ConfigError::BadValue {
            origin: origin.clone(),
            key: spec.name.into(),
            value: value.into(),
            reason,
        })?;
        self.values.insert(spec.name, (canonical, origin));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let spec = spec(key)?;
        self.values.get(spec.name).map(|(v, _)| v.as_str())
    }

    pub fn origin(&self, key: &str) -> Option<&Origin> {
        let spec = spec(key)?;
        self.values.get(spec.name).map(|(_, o)| o)
    }

    /// The full resolved configuration as a loadable file.
    pub fn echo(&self) -> String {
        let mut out = String::from("# resolved configuration\n");
        for k in KEYS {
            out.push_str(&format!("{} = {}\n", k.name, self.values[k.name].0));
        }
        out
    }

    /// Builds and validates the simulator configuration.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let r = Reader(self);
        let deg = |key: &str| -> Result<f64, ConfigError> { Ok(r.real(key)? / 180.0 * std::f64::consts::PI) };
        let mut c = SimConfig64 {
            scheme: r.parse("scheme")?,
            seed: r.parse("seed")?,
            frames: r.parse("frames")?,
            codebook_h: r.parse("codebook.n_h")?,
            codebook_v: r.parse("codebook.n_v")?,
            azimuth_start: deg("codebook.azimuth_start_deg")?,
            azimuth_span: deg("codebook.azimuth_span_deg")?,
            elevation_start: deg("codebook.elevation_start_deg")?,
            elevation_span: deg("codebook.elevation_span_deg")?,
            fading: r.parse("channel.fading")?,
            gamma_th: db_to_linear(r.real("thresholds.gamma_th_db")?),
            gamma_dec: db_to_linear(r.real("thresholds.gamma_dec_db")?),
            xi_th: r.real("thresholds.xi_th")?,
            history: r.parse("history.m")?,
            power_control: r.parse("pa.enabled")?,
            truncate: r.parse("select.truncate")?,
            center_rule: r.parse("select.center_rule")?,
            beta: r.real("predict.beta")?,
            top_init: r.flag("predict.top_init")?,
            radius: r.real("geometry.radius_m")?,
            bs_height: r.real("geometry.bs_height_m")?,
            user_height: r.real("user.height_m")?,
            speed: r.real("user.speed_kmh")? / 3.6,
            random_beams: r.parse("baseline.random_beams")?,
            linear_window: r.parse("baseline.linear_window")?,
            tree_branching: r.parse("baseline.tree_branching")?,
            ..SimConfig64::default()
        };
        c.antenna.n_h = r.parse("antenna.n_h")?;
        c.antenna.n_v = r.parse("antenna.n_v")?;
        c.antenna.d_t = r.real("antenna.d_t")?;
        c.antenna.eps_sidelobe = r.real("antenna.eps_sidelobe")?;

        c.channel.freq = r.real("channel.freq_hz")?;
        c.channel.bandwidth = r.real("channel.bandwidth_hz")?;
        c.channel.thermal_floor = dbm_to_watts(r.real("channel.n0_dbm_hz")?);
        c.channel.noise_figure_power = r.real("channel.noise_figure_w")?;
        c.channel.ref_temperature = r.real("channel.temperature_k")?;
        c.channel.absorption = self.absorption()?;

        c.budget.t_ti = r.real("frame.t_ti_s")?;
        c.budget.t_bt = r.real("frame.t_bt_s")?;
        c.budget.t_rq = r.real("frame.t_rq_s")?;
        c.budget.t_fb = r.real("frame.t_fb_s")?;
        c.budget.t_ac = r.real("frame.t_ac_s")?;

        c.pa.p_be = dbm_to_watts(r.real("pa.p_be_dbm")?);
        c.pa.p_th = dbm_to_watts(r.real("pa.p_th_dbm")?);
        c.pa.q_levels = r.parse("pa.q_levels")?;
        c.pa.s_q = r.parse("pa.s_q")?;
        c.pa.delta_th = r.real("pa.delta_th")?;
        c.pa.eta1 = r.real("pa.eta1")?;
        c.pa.eta2 = r.real("pa.eta2")?;
        c.pa.reward_normalize = r.flag("pa.reward_normalize")?;
        c.pa.rmax_global = r.flag("pa.rmax_global")?;
        c.pa.snr_floor = r.flag("pa.snr_floor")?;

        let steady_fraction = r.real("summary.steady_fraction")?;
        if !(steady_fraction > 0.0 && steady_fraction <= 1.0) {
            return Err(self.invalid("summary.steady_fraction", "must lie in (0, 1]".into()));
        }
        let warnings = c.validate().map_err(|e| match e {
            beamtrain::Error::InvalidParameter { name, reason } => self.invalid(name, reason),
            other => self.invalid("", other.to_string()),
        })?;
        Ok(Resolved { sim: c, steady_fraction, warnings, echo: self.echo() })
    }

    fn absorption(&self) -> Result<AbsorptionTable<f64>, ConfigError> {
        let coeff = self.get("channel.absorption_coeff").unwrap_or("");
        let file = self.get("channel.absorption_file").unwrap_or("");
        if !coeff.is_empty() {
            let k: f64 = coeff.parse().expect("canonicalized on entry");
            return AbsorptionTable::constant(k).map_err(|e| self.invalid("channel.absorption_coeff", e.to_string()));
        }
        if file.is_empty() {
            return Ok(AbsorptionTable::default_table());
        }
        let text = std::fs::read_to_string(file)
            .map_err(|e| self.invalid("channel.absorption_file", format!("cannot read {file}: {e}")))?;
        AbsorptionTable::parse(&text).map_err(|e| self.invalid("channel.absorption_file", format!("{file}: {e}")))
    }

    /// An invariant error attributed to the key named by `name`. A name
    /// such as `antenna.n_h/n_v` stands for several keys; the first one not
    /// left at its default supplies the origin.
    fn invalid(&self, name: &str, reason: String) -> ConfigError {
        let (section, leaves) = name.rsplit_once('.').map_or(("", name), |(s, l)| (s, l));
        let candidates: Vec<&KeySpec> = leaves
            .split('/')
            .filter(|leaf| !leaf.is_empty())
            .filter_map(|leaf| {
                let full = if section.is_empty() { leaf.to_string() } else { format!("{section}.{leaf}") };
                KEYS.iter().find(|k| k.name == full).or_else(|| KEYS.iter().find(|k| k.name.starts_with(&full)))
            })
            .collect();
        let origin = candidates
            .iter()
            .map(|k| &self.values[k.name].1)
            .find(|o| **o != Origin::Default)
            .cloned()
            .unwrap_or(Origin::Default);
        ConfigError::Invalid { origin, key: name.into(), reason }
    }
}

/// A validated configuration ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub sim: SimConfig64,
    /// Trailing fraction of frames used for summaries.
    pub steady_fraction: f64,
    pub warnings: Vec<String>,
    /// Loadable text of every resolved key.
    pub echo: String,
}

struct Reader<'a>(&'a ConfigLayers);

impl Reader<'_> {
    fn text(&self, key: &str) -> &str {
        self.0.get(key).expect("registered key")
    }

    fn parse<V: std::str::FromStr>(&self, key: &str) -> Result<V, ConfigError> {
        // canonicalization already checked every value
        self.text(key).parse().map_err(|_| self.0.invalid(key, "unparsable value".into()))
    }

    fn real(&self, key: &str) -> Result<f64, ConfigError> {
        self.parse(key)
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        Ok(self.text(key) == "true")
    }
}

fn canonicalize(kind: Kind, value: &str) -> Result<String, String> {
    fn real(v: &str) -> Result<f64, String> {
        let x: f64 = v.parse().map_err(|_| "expected a number".to_string())?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err("must be finite".into())
        }
    }
    Ok(match kind {
        Kind::Real => real(value)?.to_string(),
        Kind::OptReal if value.is_empty() => String::new(),
        Kind::OptReal => real(value)?.to_string(),
        Kind::Count => value.parse::<usize>().map_err(|_| "expected a non-negative integer")?.to_string(),
        Kind::Seed => value.parse::<u64>().map_err(|_| "expected a non-negative integer")?.to_string(),
        Kind::Flag => match value {
            "true" | "on" | "yes" | "1" => "true".into(),
            "false" | "off" | "no" | "0" => "false".into(),
            _ => return Err("expected true or false".into()),
        },
        Kind::Toggle => value.parse::<Toggle>().map_err(|e| e.to_string())?.to_string(),
        Kind::Scheme => value.parse::<Scheme>().map_err(|e| e.to_string())?.to_string(),
        Kind::Fading => value.parse::<FadingModel>().map_err(|e| e.to_string())?.to_string(),
        Kind::CenterRule => value.parse::<CenterRule>().map_err(|e| e.to_string())?.as_str().to_string(),
        Kind::Path => value.to_string(),
    })
}

/// Loads defaults, then the optional file, then `overrides` in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<ConfigLayers, ConfigError> {
    let mut layers = match path {
        Some(p) => ConfigLayers::from_file(p)?,
        None => ConfigLayers::default(),
    };
    for o in overrides {
        layers.apply_override(o)?;
    }
    Ok(layers)
}
