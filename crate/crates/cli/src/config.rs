//! Flat `key = value` configuration with `#` comments.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use hismhd_core::analysis::CommutatorMode;
use hismhd_core::init::SimParams;
use hismhd_core::integrator::IntegratorConfig;

use crate::error::usage;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub n: usize,
    pub length: f64,
    pub integrator: IntegratorConfig,
    pub leray_project: bool,
    /// Threshold of the monitor verdict; `None` means `M0^{-1/2}`.
    pub monitor_budget: Option<f64>,
    pub commutator: CommutatorMode,
    /// Random states per identity or residual check.
    pub verify_states: usize,
    /// Last time of the lemma time grids.
    pub lemma_t_max: f64,
    pub lemma_samples: usize,
    /// Relative tolerance of the continuous quadrature oracle.
    pub oracle_tol: f64,
    pub multiplier_resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SimParams::default(),
            n: 32,
            length: 16.0,
            integrator: IntegratorConfig::default(),
            leray_project: true,
            monitor_budget: None,
            commutator: CommutatorMode::Spectral,
            verify_states: 4,
            lemma_t_max: 60.0,
            lemma_samples: 9,
            oracle_tol: 1e-6,
            multiplier_resolution: 801,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> anyhow::Result<f64> {
    v.parse::<f64>().map_err(|_| usage(format!("`{key}`: `{v}` is not a number")))
}

fn parse_usize(key: &str, v: &str) -> anyhow::Result<usize> {
    v.parse::<usize>().map_err(|_| usage(format!("`{key}`: `{v}` is not a non-negative integer")))
}

fn parse_bool(key: &str, v: &str) -> anyhow::Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("`{key}`: `{v}` is not a boolean"))),
    }
}

pub const KEYS: &[&str] = &[
    "nu",
    "mu",
    "sigma",
    "kappa",
    "alpha",
    "m0",
    "m1",
    "m2",
    "delta",
    "alpha1",
    "alpha2",
    "small_budget",
    "seed",
    "n",
    "length",
    "order",
    "dt_init",
    "dt_min",
    "dt_max",
    "tolerance",
    "safety",
    "t_end",
    "checkpoint_interval",
    "diagnostics_interval",
    "adaptive",
    "leray_project",
    "monitor_budget",
    "commutator",
    "verify_states",
    "lemma_t_max",
    "lemma_samples",
    "oracle_tol",
    "multiplier_resolution",
];

impl RunConfig {
    pub fn set(&mut self, key: &str, v: &str) -> anyhow::Result<()> {
        let p = &mut self.params;
        let ic = &mut self.integrator;
        match key {
            "seed" => p.seed = v.parse().map_err(|_| usage(format!("`seed`: `{v}` is not an unsigned integer")))?,
            "nu" => p.nu = parse_f64(key, v)?,
            "mu" => p.mu = parse_f64(key, v)?,
            "sigma" => p.sigma = parse_f64(key, v)?,
            "kappa" => p.kappa = parse_f64(key, v)?,
            "alpha" => p.alpha = parse_f64(key, v)?,
            "m0" => p.m0 = parse_f64(key, v)?,
            "m1" => p.m1 = parse_f64(key, v)?,
            "m2" => p.m2 = parse_f64(key, v)?,
            "delta" => p.delta = parse_f64(key, v)?,
            "alpha1" => p.alpha1 = parse_f64(key, v)?,
            "alpha2" => p.alpha2 = parse_f64(key, v)?,
            "small_budget" => p.small_budget = parse_f64(key, v)?,
            "n" => self.n = parse_usize(key, v)?,
            "length" => self.length = parse_f64(key, v)?,
            "order" => ic.order = parse_usize(key, v)? as u32,
            "dt_init" => ic.dt_init = parse_f64(key, v)?,
            "dt_min" => ic.dt_min = parse_f64(key, v)?,
            "dt_max" => ic.dt_max = parse_f64(key, v)?,
            "tolerance" => ic.tolerance = parse_f64(key, v)?,
            "safety" => ic.safety = parse_f64(key, v)?,
            "t_end" => ic.t_end = parse_f64(key, v)?,
            "checkpoint_interval" => ic.checkpoint_interval = parse_f64(key, v)?,
            "diagnostics_interval" => ic.diagnostics_interval = parse_f64(key, v)?,
            "adaptive" => ic.adaptive = parse_bool(key, v)?,
            "leray_project" => self.leray_project = parse_bool(key, v)?,
            "monitor_budget" => {
                self.monitor_budget = if v == "auto" { None } else { Some(parse_f64(key, v)?) };
            }
            "commutator" => {
                self.commutator = match v {
                    "local" => CommutatorMode::Local,
                    "spectral" => CommutatorMode::Spectral,
                    _ => return Err(usage(format!("`commutator`: `{v}` is not `local` or `spectral`"))),
                }
            }
            "verify_states" => self.verify_states = parse_usize(key, v)?,
            "lemma_t_max" => self.lemma_t_max = parse_f64(key, v)?,
            "lemma_samples" => self.lemma_samples = parse_usize(key, v)?,
            "oracle_tol" => self.oracle_tol = parse_f64(key, v)?,
            "multiplier_resolution" => self.multiplier_resolution = parse_usize(key, v)?,
            _ => return Err(usage(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.params;
        let ic = &self.integrator;
        let f = |x: f64| format!("{x:?}");
        Some(match key {
            "seed" => p.seed.to_string(),
            "nu" => f(p.nu),
            "mu" => f(p.mu),
            "sigma" => f(p.sigma),
            "kappa" => f(p.kappa),
            "alpha" => f(p.alpha),
            "m0" => f(p.m0),
            "m1" => f(p.m1),
            "m2" => f(p.m2),
            "delta" => f(p.delta),
            "alpha1" => f(p.alpha1),
            "alpha2" => f(p.alpha2),
            "small_budget" => f(p.small_budget),
            "n" => self.n.to_string(),
            "length" => f(self.length),
            "order" => ic.order.to_string(),
            "dt_init" => f(ic.dt_init),
            "dt_min" => f(ic.dt_min),
            "dt_max" => f(ic.dt_max),
            "tolerance" => f(ic.tolerance),
            "safety" => f(ic.safety),
            "t_end" => f(ic.t_end),
            "checkpoint_interval" => f(ic.checkpoint_interval),
            "diagnostics_interval" => f(ic.diagnostics_interval),
            "adaptive" => ic.adaptive.to_string(),
            "leray_project" => self.leray_project.to_string(),
            "monitor_budget" => self.monitor_budget.map_or("auto".to_string(), f),
            "commutator" => self.commutator.name().to_string(),
            "verify_states" => self.verify_states.to_string(),
            "lemma_t_max" => f(self.lemma_t_max),
            "lemma_samples" => self.lemma_samples.to_string(),
            "oracle_tol" => f(self.oracle_tol),
            "multiplier_resolution" => self.multiplier_resolution.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected `key = value`, got `{raw}`", no + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| usage(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            let _ = writeln!(s, "{k} = {}", self.get(k).expect("listed key"));
        }
        s
    }

    /// Rejects physically or numerically invalid values, naming the field.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.params.validate().map_err(|e| usage(e.to_string()))?;
        self.integrator.validate().map_err(|e| usage(e.to_string()))?;
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(usage(format!("`n`: {} must be a power of two, at least 8", self.n)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(usage(format!("`length`: {} must be positive", self.length)));
        }
        if let Some(b) = self.monitor_budget {
            if !(b > 0.0) {
                return Err(usage(format!("`monitor_budget`: {b} must be positive")));
            }
        }
        if self.lemma_samples < 8 {
            return Err(usage(format!("`lemma_samples`: {} is below 8", self.lemma_samples)));
        }
        if !(self.lemma_t_max > 0.0) {
            return Err(usage(format!("`lemma_t_max`: {} must be positive", self.lemma_t_max)));
        }
        if !(self.oracle_tol > 0.0 && self.oracle_tol < 1.0) {
            return Err(usage(format!("`oracle_tol`: {} is outside (0, 1)", self.oracle_tol)));
        }
        if self.multiplier_resolution < 2 {
            return Err(usage("`multiplier_resolution` must be at least 2"));
        }
        Ok(())
    }

    /// `(name, value)` pairs written into file headers and checkpoints.
    pub fn header_values(&self) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = self.params.named_values().into_iter().map(|(k, x)| (k.to_string(), x)).collect();
        v.push(("n".into(), self.n as f64));
        v.push(("length".into(), self.length));
        v.push(("leray_project".into(), if self.leray_project { 1.0 } else { 0.0 }));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::UsageError;

    #[test]
    fn round_trip_is_lossless() {
        let mut c = RunConfig::default();
        c.params.nu = 0.1 + 0.2;
        c.params.seed = u64::MAX;
        c.monitor_budget = Some(1.0 / 3.0);
        c.commutator = CommutatorMode::Local;
        c.integrator.adaptive = false;
        let back = RunConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(RunConfig::parse(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }

    #[test]
    fn every_key_is_settable() {
        let c = RunConfig::default();
        for k in KEYS {
            let mut d = RunConfig::default();
            d.set(k, &c.get(k).unwrap()).unwrap();
        }
    }

    #[test]
    fn comments_blank_lines_and_errors() {
        let c = RunConfig::parse("# header\n\nnu = 2.5  # trailing\n  alpha=1\n").unwrap();
        assert_eq!(c.params.nu, 2.5);
        assert_eq!(c.params.alpha, 1.0);
        for bad in ["nope = 1", "nu 1", "nu = x", "adaptive = maybe", "commutator = other"] {
            let e = RunConfig::parse(bad).unwrap_err();
            assert!(e.downcast_ref::<UsageError>().is_some(), "{bad}");
        }
    }

    #[test]
    fn validation_names_the_field() {
        for (k, v) in [("kappa", "-1"), ("alpha", "2.5"), ("delta", "0"), ("delta", "0.6"), ("n", "12")] {
            let mut c = RunConfig::default();
            c.set(k, v).unwrap();
            let e = c.validate().unwrap_err().to_string();
            assert!(e.contains(k), "{k}: {e}");
        }
        RunConfig::default().validate().unwrap();
    }
}
