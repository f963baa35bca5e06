//! Experiment configuration: a flat TOML document with optional `[output]`,
//! `[convergence]`, `[search]` and `[physical]` tables.
//!
//! All times and rates are in units of `1/Γ_c` and `Γ_c`. The canonical
//! schema is documented in `configs/README.md`.

use std::fmt;
use std::path::{Path, PathBuf};

use dfs_core::{map_physical_params, EdgeTarget, PhysicalParams};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DETUNING_RATIO: f64 = 0.1;
pub const DEFAULT_GAMMA_C: f64 = 1.0;
pub const DEFAULT_SAMPLES: usize = 1000;
/// Step for quench and ramp runs.
pub const DEFAULT_SLOW_DT: f64 = 1e-3;
/// Shortcut step as a fraction of the run duration.
pub const DEFAULT_SHORTCUT_DT_FRACTION: f64 = 1e-5;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_HALVINGS: usize = 4;
/// Relative mismatch allowed between explicit `gamma_c`/`detuning_ratio`
/// and the values mapped from a `[physical]` block.
const PHYSICAL_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Quench,
    Ramp,
    EdgeShortcut,
    CentralShortcut,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Quench => "quench",
            ProtocolKind::Ramp => "ramp",
            ProtocolKind::EdgeShortcut => "edge_shortcut",
            ProtocolKind::CentralShortcut => "central_shortcut",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    Negative,
    Positive,
}

impl From<TargetName> for EdgeTarget {
    fn from(t: TargetName) -> Self {
        match t {
            TargetName::Negative => EdgeTarget::Negative,
            TargetName::Positive => EdgeTarget::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub timeseries: PathBuf,
    pub final_state: PathBuf,
}

/// Halve `dt` until final purity and target overlap move by less than `tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: usize,
}

impl Default for Convergence {
    fn default() -> Self {
        Self { tol: DEFAULT_CONVERGENCE_TOL, max_halvings: DEFAULT_MAX_HALVINGS }
    }
}

/// Duration bracket for `search`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBounds {
    pub lower: f64,
    pub upper: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Step of the quench and ramp trial runs.
    #[serde(default = "default_search_dt")]
    pub dt: f64,
}

/// Laboratory parameters; mapped onto `gamma_c`, `detuning_ratio` and the
/// static operating point `(μ, χ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub kappa: f64,
    pub g: f64,
    pub omega1_amp: f64,
    pub omega2_amp: f64,
    pub eta: f64,
    pub delta_e: f64,
    pub delta_c_prime: f64,
}

impl From<PhysicalBlock> for PhysicalParams {
    fn from(p: PhysicalBlock) -> Self {
        PhysicalParams {
            kappa: p.kappa,
            g: p.g,
            omega1_amp: p.omega1_amp,
            omega2_amp: p.omega2_amp,
            eta: p.eta,
            delta_e: p.delta_e,
            delta_c_prime: p.delta_c_prime,
        }
    }
}

/// A validated experiment. Optional fields that have a default are filled
/// on load, so writing a loaded config and loading it again is lossless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub atoms: usize,
    pub charge: i64,
    pub protocol: ProtocolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Convergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalBlock>,
}

fn default_tol() -> f64 {
    DEFAULT_CONVERGENCE_TOL
}

fn default_halvings() -> usize {
    DEFAULT_MAX_HALVINGS
}

fn default_rel_tol() -> f64 {
    1e-2
}

fn default_search_dt() -> f64 {
    5e-3
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
    parse_config(&text).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_owned(), message },
        other => other,
    })
}

/// Parses, validates and fills defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut config: ExperimentConfig = toml::from_str(text)
        .map_err(|e| ConfigError::Parse { path: PathBuf::from("<config>"), message: e.to_string() })?;
    config.apply_defaults()?;
    config.validate()?;
    Ok(config)
}

pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config values are always representable in TOML")
}

fn positive(name: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {value}")))
    }
}

impl ExperimentConfig {
    fn apply_defaults(&mut self) -> Result<(), ConfigError> {
        if let Some(p) = self.physical {
            let mapped =
                map_physical_params(&p.into(), self.atoms.max(1)).map_err(|e| invalid(format!("physical: {e}")))?;
            for (name, explicit, value) in [
                ("gamma_c", self.gamma_c, mapped.gamma_c),
                ("detuning_ratio", self.detuning_ratio, mapped.detuning_ratio),
            ] {
                if let Some(x) = explicit {
                    if (x - value).abs() > PHYSICAL_MATCH_TOL * value.abs().max(f64::MIN_POSITIVE) {
                        return Err(invalid(format!(
                            "{name} = {x} conflicts with the physical block, which gives {value}"
                        )));
                    }
                }
            }
            self.gamma_c = Some(mapped.gamma_c);
            self.detuning_ratio = Some(mapped.detuning_ratio);
        }
        self.detuning_ratio.get_or_insert(DEFAULT_DETUNING_RATIO);
        self.gamma_c.get_or_insert(DEFAULT_GAMMA_C);
        self.samples.get_or_insert(DEFAULT_SAMPLES);
        if self.protocol == ProtocolKind::EdgeShortcut && self.target.is_none() {
            self.target = match EdgeTarget::from_charge(self.charge, self.atoms) {
                Some(EdgeTarget::Negative) => Some(TargetName::Negative),
                Some(EdgeTarget::Positive) => Some(TargetName::Positive),
                None => None,
            };
        }
        if self.protocol != ProtocolKind::Quench {
            match (self.beta, self.t_final) {
                (Some(b), None) if b > 0.0 => self.t_final = Some(1.0 / b),
                (None, Some(t)) if t > 0.0 => self.beta = Some(1.0 / t),
                _ => {}
            }
        }
        if self.dt.is_none() {
            self.dt = match (self.protocol, self.t_final) {
                (ProtocolKind::Quench | ProtocolKind::Ramp, _) => Some(DEFAULT_SLOW_DT),
                (_, Some(t)) => Some(DEFAULT_SHORTCUT_DT_FRACTION * t),
                _ => None,
            };
        }
        Ok(())
    }

    /// Checks every invariant; assumes defaults have been applied.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.atoms == 0 {
            return Err(invalid("atoms must be at least 1"));
        }
        if self.charge.unsigned_abs() as usize > self.atoms {
            return Err(invalid(format!("|charge| = {} exceeds atoms = {}", self.charge.abs(), self.atoms)));
        }
        let present = |name: &'static str, set: bool| set.then_some(name);
        let fields = [
            present("mu_q", self.mu_q.is_some()),
            present("beta", self.beta.is_some()),
            present("cutoff_factor", self.cutoff_factor.is_some()),
            present("target", self.target.is_some()),
        ];
        let allowed: &[&str] = match self.protocol {
            ProtocolKind::Quench => &["mu_q"],
            ProtocolKind::Ramp | ProtocolKind::CentralShortcut => &["beta"],
            ProtocolKind::EdgeShortcut => &["beta", "cutoff_factor", "target"],
        };
        if let Some(stray) = fields.iter().flatten().find(|f| !allowed.contains(f)) {
            return Err(invalid(format!("`{stray}` does not belong to the {} protocol", self.protocol)));
        }
        match self.protocol {
            ProtocolKind::Quench => {
                let mu_q = self.mu_q.ok_or_else(|| invalid("quench needs mu_q"))?;
                if !(0.0..1.0).contains(&mu_q) {
                    return Err(invalid(format!("mu_q must lie in [0, 1), got {mu_q}")));
                }
                if self.t_final.is_none() {
                    return Err(invalid("quench needs t_final"));
                }
            }
            ProtocolKind::Ramp | ProtocolKind::CentralShortcut | ProtocolKind::EdgeShortcut => {
                if self.beta.is_none() {
                    return Err(invalid(format!("{} needs beta or t_final", self.protocol)));
                }
            }
        }
        if self.protocol == ProtocolKind::CentralShortcut && self.charge != 0 {
            return Err(invalid(format!("central_shortcut prepares C = 0, got charge = {}", self.charge)));
        }
        if self.protocol == ProtocolKind::EdgeShortcut {
            let cutoff = self.cutoff_factor.ok_or_else(|| invalid("edge_shortcut needs cutoff_factor"))?;
            if !(cutoff.is_finite() && cutoff > std::f64::consts::SQRT_2) {
                return Err(invalid(format!("cutoff_factor must exceed sqrt(2), got {cutoff}")));
            }
            let target = self.target.ok_or_else(|| invalid("edge_shortcut needs charge = ±atoms"))?;
            if EdgeTarget::from(target).charge(self.atoms) != self.charge {
                return Err(invalid(format!("target {target:?} does not match charge = {}", self.charge)));
            }
        }
        for (name, value) in [
            ("beta", self.beta),
            ("t_final", self.t_final),
            ("dt", self.dt),
            ("gamma_c", self.gamma_c),
            ("cutoff_factor", self.cutoff_factor),
        ] {
            if let Some(v) = value {
                positive(name, v)?;
            }
        }
        let detuning = self.detuning_ratio.unwrap_or(DEFAULT_DETUNING_RATIO);
        if !detuning.is_finite() {
            return Err(invalid("detuning_ratio must be finite"));
        }
        if self.samples == Some(0) {
            return Err(invalid("samples must be at least 1"));
        }
        if let (Some(dt), Some(t)) = (self.dt, self.t_final) {
            if dt > t {
                return Err(invalid(format!("dt = {dt} exceeds t_final = {t}")));
            }
        }
        if let Some(c) = self.convergence {
            positive("convergence.tol", c.tol)?;
        }
        if let Some(s) = self.search {
            positive("search.lower", s.lower)?;
            positive("search.rel_tol", s.rel_tol)?;
            positive("search.dt", s.dt)?;
            if s.upper <= s.lower {
                return Err(invalid(format!("search.upper = {} must exceed search.lower = {}", s.upper, s.lower)));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{}_n{}_c{}", self.protocol, self.atoms, self.charge))
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c.unwrap_or(DEFAULT_GAMMA_C)
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.detuning_ratio.unwrap_or(DEFAULT_DETUNING_RATIO)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    /// Output paths, falling back to `<dir>/<label>_timeseries.csv` and
    /// `<dir>/<label>_final.json`.
    pub fn output_paths(&self, dir: &Path) -> OutputPaths {
        self.output.clone().unwrap_or_else(|| OutputPaths {
            timeseries: dir.join(format!("{}_timeseries.csv", self.label())),
            final_state: dir.join(format!("{}_final.json", self.label())),
        })
    }
}
