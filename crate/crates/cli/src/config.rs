//! Flat `key = value` configuration. Values from a config file are overridden
//! by command-line flags of the same name (`--nu-max` sets `nu_max`).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use tc_core::ModelParams;

use crate::error::{CliError, Result};

/// Every key the tool understands. Unknown keys in a config file are rejected.
pub const KEYS: &[&str] = &[
    "emitters",
    "detuning",
    "coupling",
    "nu_min",
    "nu_max",
    "rho_min",
    "rho_max",
    "rho_steps",
    "omega_a_grid",
    "rho_set",
    "eta",
    "epsilon",
    "jump_threshold",
    "step_ratio",
    "nu",
    "out",
    "threads",
];

pub type RawConfig = BTreeMap<String, String>;

/// Parse `key = value` lines. Blank lines and `#` comments are skipped; dashes
/// in keys are read as underscores.
pub fn parse_config(text: &str) -> Result<RawConfig> {
    let mut map = RawConfig::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn read_config(path: &std::path::Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    raw.get(key)
        .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("{key} = {v:?}: {e}"))))
        .transpose()
}

fn parse_list<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<Vec<T>>>
where
    T::Err: std::fmt::Display,
{
    let Some(v) = raw.get(key) else { return Ok(None) };
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::Config(format!("{key}: {s:?}: {e}"))))
        .collect::<Result<Vec<T>>>()
        .map(Some)
}

/// `lo:hi:count` for an even grid, otherwise a comma-separated list.
fn parse_grid(raw: &RawConfig, key: &str) -> Result<Option<Vec<f64>>> {
    let Some(v) = raw.get(key) else { return Ok(None) };
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    if parts.len() == 1 {
        return parse_list(raw, key);
    }
    let bad = || CliError::Config(format!("{key} = {v:?}: expected lo:hi:count or a list"));
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    Ok(Some(tc_core::sweep::linspace(lo, hi, n)))
}

pub const DEFAULT_RHO_SET: [f64; 6] = [-0.4, -0.2, 0.0, 0.2, 0.4, 0.6];

/// Resolved, validated settings shared by all run modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub emitters: u32,
    pub detuning: f64,
    pub coupling: f64,
    pub nu_min: u64,
    pub nu_max: u64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_steps: usize,
    pub omega_a_grid: Vec<f64>,
    pub rho_set: Vec<f64>,
    pub eta: f64,
    pub epsilon: f64,
    pub jump_threshold: f64,
    pub step_ratio: f64,
    pub nu: Vec<u64>,
    pub out: Option<PathBuf>,
    /// 0 lets rayon pick.
    pub threads: usize,
}

impl Settings {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let emitters = parse(raw, "emitters")?.unwrap_or(1000u32);
        let s = Self {
            emitters,
            detuning: parse(raw, "detuning")?.unwrap_or(3.0),
            coupling: parse(raw, "coupling")?.unwrap_or(1.0),
            nu_min: parse(raw, "nu_min")?.unwrap_or(0),
            nu_max: parse(raw, "nu_max")?.unwrap_or(3 * u64::from(emitters)),
            rho_min: parse(raw, "rho_min")?.unwrap_or(-0.5),
            rho_max: parse(raw, "rho_max")?.unwrap_or(2.5),
            rho_steps: parse(raw, "rho_steps")?.unwrap_or(301),
            omega_a_grid: parse_grid(raw, "omega_a_grid")?
                .unwrap_or_else(|| tc_core::sweep::linspace(-3.0, 3.0, 61)),
            rho_set: parse_list(raw, "rho_set")?.unwrap_or_else(|| DEFAULT_RHO_SET.to_vec()),
            eta: parse(raw, "eta")?.unwrap_or(0.0),
            epsilon: parse(raw, "epsilon")?.unwrap_or(0.0),
            jump_threshold: parse(raw, "jump_threshold")?
                .unwrap_or(tc_core::observables::DEFAULT_JUMP_THRESHOLD),
            step_ratio: parse(raw, "step_ratio")?.unwrap_or(tc_core::observables::DEFAULT_STEP_RATIO),
            nu: parse_list(raw, "nu")?.unwrap_or_default(),
            out: raw.get("out").filter(|v| v.as_str() != "-").map(PathBuf::from),
            threads: parse(raw, "threads")?.unwrap_or(0),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.emitters == 0 {
            return fail("emitters must be at least 1".into());
        }
        for (k, v) in [
            ("detuning", self.detuning),
            ("coupling", self.coupling),
            ("rho_min", self.rho_min),
            ("rho_max", self.rho_max),
            ("eta", self.eta),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() {
                return fail(format!("{k} must be finite"));
            }
        }
        if self.nu_min > self.nu_max {
            return fail(format!("nu_min = {} exceeds nu_max = {}", self.nu_min, self.nu_max));
        }
        if !(self.rho_min < self.rho_max) {
            return fail(format!("rho_min = {} must be below rho_max = {}", self.rho_min, self.rho_max));
        }
        if self.rho_steps < 2 {
            return fail("rho_steps must be at least 2".into());
        }
        if self.omega_a_grid.is_empty() || self.omega_a_grid.iter().any(|w| !w.is_finite()) {
            return fail("omega_a_grid must be a nonempty list of finite values".into());
        }
        if self.rho_set.is_empty() {
            return fail("rho_set must not be empty".into());
        }
        if !(self.jump_threshold > 0.0) || !(self.step_ratio >= 1.0) {
            return fail("jump_threshold must be positive and step_ratio at least 1".into());
        }
        Ok(())
    }

    /// Model at the configured detuning with `ω_c = 1`.
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.emitters, 1.0, self.detuning, self.coupling)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Value of `key` as echoed in output headers.
    pub fn echo(&self, key: &str) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        match key {
            "emitters" => self.emitters.to_string(),
            "detuning" => format!("{:?}", self.detuning),
            "coupling" => format!("{:?}", self.coupling),
            "nu_min" => self.nu_min.to_string(),
            "nu_max" => self.nu_max.to_string(),
            "rho_min" => format!("{:?}", self.rho_min),
            "rho_max" => format!("{:?}", self.rho_max),
            "rho_steps" => self.rho_steps.to_string(),
            "omega_a_grid" => list(&self.omega_a_grid),
            "rho_set" => list(&self.rho_set),
            "eta" => format!("{:?}", self.eta),
            "epsilon" => format!("{:?}", self.epsilon),
            "jump_threshold" => format!("{:?}", self.jump_threshold),
            "step_ratio" => format!("{:?}", self.step_ratio),
            "nu" => self.nu.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            _ => String::new(),
        }
    }
}
