//! Flat `key = value` run configuration.
//!
//! Frequencies are ordinary frequencies in MHz; they are converted to rad/µs
//! when the core parameter types are built.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cascade_core::level_system::{alternating_detunings, SystemParams};
use cascade_core::rb85::Rb85Params;
use cascade_core::spectrum::DEFAULT_THRESHOLD;
use cascade_core::units::mhz_to_angular;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

const KEYS: &[&str] = &[
    "n_levels",
    "rabi_mhz",
    "rabi_over_gamma",
    "gamma_mhz",
    "gamma_prime_mhz",
    "delta_mhz",
    "detunings_mhz",
    "delta_omega_s_mhz",
    "ground_splitting_mhz",
    "excited_splitting_mhz",
    "detuning_mhz",
    "offset_on_pi",
    "sweep_start",
    "sweep_stop",
    "sweep_count",
    "sweep_spacing",
    "threshold",
    "seed",
];

/// Keys that describe the same quantity; setting one through an override
/// clears the others.
const EXCLUSIVE: &[&[&str]] = &[&["rabi_mhz", "rabi_over_gamma"], &["delta_mhz", "detunings_mhz"]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rabi {
    Mhz(f64),
    OverGamma(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detunings {
    /// Two-photon detuning with the alternating pattern.
    TwoPhoton(f64),
    PerField(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k == 0 {
                    return self.start;
                }
                if k == self.count - 1 {
                    return self.stop;
                }
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_levels: usize,
    pub rabi: Rabi,
    pub gamma_mhz: f64,
    pub gamma_prime_mhz: f64,
    pub detunings: Detunings,
    pub delta_omega_s_mhz: f64,
    pub ground_splitting_mhz: Option<f64>,
    pub excited_splitting_mhz: Option<f64>,
    /// One-photon detuning of both ⁸⁵Rb drive fields.
    pub detuning_mhz: f64,
    pub offset_on_pi: bool,
    pub sweep: Option<Sweep>,
    pub threshold: f64,
    pub seed: u64,
}

/// Unresolved key/value entries after file parsing and overrides.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            check_key(key)?;
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(CliError::config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(RawConfig { entries })
    }

    /// Applies a command-line override, clearing mutually exclusive keys.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        check_key(key)?;
        if let Some(group) = EXCLUSIVE.iter().find(|g| g.contains(&key)) {
            for other in group.iter() {
                self.entries.remove(*other);
            }
        }
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::config(format!("cannot parse `{key}` value `{v}`")))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::config(format!("cannot parse `{key}` entry `{s}`")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn resolve(&self, default_spacing: Spacing) -> Result<RunConfig, CliError> {
        let exclusive = |a: &str, b: &str| {
            if self.entries.contains_key(a) && self.entries.contains_key(b) {
                Err(CliError::config(format!("`{a}` and `{b}` are mutually exclusive")))
            } else {
                Ok(())
            }
        };
        exclusive("rabi_mhz", "rabi_over_gamma")?;
        exclusive("delta_mhz", "detunings_mhz")?;

        let n_levels: usize = self.get("n_levels")?.unwrap_or(3);
        if n_levels.is_multiple_of(2) {
            return Err(CliError::config(format!("n_levels must be odd (got {n_levels})")));
        }
        if n_levels < 3 {
            return Err(CliError::config(format!("n_levels must be at least 3 (got {n_levels})")));
        }
        let rabi = match (self.get("rabi_mhz")?, self.get("rabi_over_gamma")?) {
            (Some(mhz), _) => Rabi::Mhz(mhz),
            (None, Some(ratio)) => Rabi::OverGamma(ratio),
            (None, None) => Rabi::OverGamma(8e-3),
        };
        let detunings = match self.list("detunings_mhz")? {
            Some(list) => {
                if list.len() != n_levels - 1 {
                    return Err(CliError::config(format!(
                        "detunings_mhz needs {} values for n_levels = {n_levels}, got {}",
                        n_levels - 1,
                        list.len()
                    )));
                }
                Detunings::PerField(list)
            }
            None => Detunings::TwoPhoton(self.get("delta_mhz")?.unwrap_or(0.0)),
        };
        let offset_on_pi = match self.entries.get("offset_on_pi").map(String::as_str) {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => return Err(CliError::config(format!("offset_on_pi must be true or false, got `{other}`"))),
        };
        let sweep = self.sweep(default_spacing)?;
        let threshold = self.get("threshold")?.unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(CliError::config(format!("threshold must be finite and > 0, got {threshold}")));
        }
        Ok(RunConfig {
            n_levels,
            rabi,
            gamma_mhz: self.get("gamma_mhz")?.unwrap_or(1900.0),
            gamma_prime_mhz: self.get("gamma_prime_mhz")?.unwrap_or(0.2),
            detunings,
            delta_omega_s_mhz: self.get("delta_omega_s_mhz")?.unwrap_or(2.34),
            ground_splitting_mhz: self.get("ground_splitting_mhz")?,
            excited_splitting_mhz: self.get("excited_splitting_mhz")?,
            detuning_mhz: self.get("detuning_mhz")?.unwrap_or(0.0),
            offset_on_pi,
            sweep,
            threshold,
            seed: self.get("seed")?.unwrap_or(0),
        })
    }

    fn sweep(&self, default_spacing: Spacing) -> Result<Option<Sweep>, CliError> {
        let start: Option<f64> = self.get("sweep_start")?;
        let stop: Option<f64> = self.get("sweep_stop")?;
        let count: Option<usize> = self.get("sweep_count")?;
        let spacing = match self.entries.get("sweep_spacing").map(String::as_str) {
            None => default_spacing,
            Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(CliError::config(format!("sweep_spacing must be linear or log, got `{other}`"))),
        };
        let (start, stop, count) = match (start, stop, count) {
            (None, None, None) => return Ok(None),
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(CliError::config(
                    "sweep needs all of sweep_start, sweep_stop and sweep_count",
                ))
            }
        };
        if count < 2 {
            return Err(CliError::config(format!("sweep_count must be at least 2, got {count}")));
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err(CliError::config("sweep endpoints must be finite"));
        }
        if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
            return Err(CliError::config("log spacing needs positive sweep endpoints"));
        }
        Ok(Some(Sweep {
            start,
            stop,
            count,
            spacing,
        }))
    }
}

fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::config(format!("unknown configuration key `{key}`")))
    }
}

impl RunConfig {
    pub fn gamma(&self) -> f64 {
        mhz_to_angular(self.gamma_mhz)
    }

    pub fn gamma_prime(&self) -> f64 {
        mhz_to_angular(self.gamma_prime_mhz)
    }

    pub fn delta_omega_s(&self) -> f64 {
        mhz_to_angular(self.delta_omega_s_mhz)
    }

    /// Rabi frequency in rad/µs.
    pub fn rabi(&self) -> f64 {
        match self.rabi {
            Rabi::Mhz(f) => mhz_to_angular(f),
            Rabi::OverGamma(r) => r * self.gamma(),
        }
    }

    pub fn detunings(&self) -> Vec<f64> {
        match &self.detunings {
            Detunings::TwoPhoton(d) => alternating_detunings(self.n_levels, mhz_to_angular(*d)),
            Detunings::PerField(list) => list.iter().map(|d| mhz_to_angular(*d)).collect(),
        }
    }

    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        self.system_params_with(self.rabi(), self.detunings())
    }

    pub fn system_params_with(&self, rabi: f64, detunings: Vec<f64>) -> Result<SystemParams, CliError> {
        Ok(SystemParams::new(
            self.n_levels,
            rabi,
            self.gamma(),
            self.gamma_prime(),
            detunings,
            self.delta_omega_s(),
        )?)
    }

    pub fn rb85_params(&self) -> Rb85Params {
        let dws = self.delta_omega_s();
        Rb85Params {
            rabi: self.rabi(),
            gamma: self.gamma(),
            gamma_prime: self.gamma_prime(),
            ground_splitting: self.ground_splitting_mhz.map_or(dws, mhz_to_angular),
            excited_splitting: self.excited_splitting_mhz.map_or(dws, mhz_to_angular),
            delta_omega_s: dws,
            detuning: mhz_to_angular(self.detuning_mhz),
            offset_on_pi: self.offset_on_pi,
        }
    }

    /// SHA-256 over the command and the resolved configuration.
    pub fn hash(&self, command: &str, flags: &[(&str, bool)]) -> String {
        let canonical = serde_json::to_string(&(command, self, flags)).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
