//! JSON run configuration with `{model, run, output}` blocks.

use std::path::PathBuf;

use serde::Deserialize;

use crate::lindblad_model::XYZChainConfig;
use crate::zeno_spectrum::ZenoOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `start, start + step, ...` up to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite() && self.step > 0.0) {
            return Err("start, stop and step must be finite with step > 0".into());
        }
        if self.stop < self.start {
            return Err("stop is below start".into());
        }
        let n = ((self.stop - self.start) / self.step).round();
        if (self.start + n * self.step - self.stop).abs() > 1e-9 * self.step.max(self.stop.abs()) {
            return Err("stop - start is not a multiple of step".into());
        }
        Ok((0..=n as usize).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    /// Grid for `sweep-gamma`.
    pub gammas: Option<Vec<f64>>,
    /// Grid for `scan-ep`.
    pub ep_grid: Option<GridSpec>,
    /// Clustering window for near-degenerate zeroth-order values.
    pub window_rel: Option<f64>,
    pub compute_eigenvectors: bool,
    pub emit_diagnostics: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: XYZChainConfig,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A schema or value problem, with the dotted path of the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

fn bad(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), message: message.into() }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError { path: if path == "." { "<root>".into() } else { path }, message: e.inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if m.n_free == 0 {
            return Err(bad("model.n_free", "must be at least 1"));
        }
        if m.n_free > crate::lindblad_model::MAX_FREE_SPINS {
            return Err(bad("model.n_free", format!("at most {} free spins", crate::lindblad_model::MAX_FREE_SPINS)));
        }
        for (i, j) in m.j.iter().enumerate() {
            if !j.is_finite() {
                return Err(bad(&format!("model.j[{i}]"), "must be finite"));
            }
        }
        for (name, v) in [("theta", m.theta), ("phi", m.phi)] {
            if !v.is_finite() {
                return Err(bad(&format!("model.{name}"), "must be finite"));
            }
        }
        if !(m.mu.is_finite() && m.mu.abs() <= 1.0) {
            return Err(bad("model.mu", "must lie in [-1, 1]"));
        }
        if !(m.gamma.is_finite() && m.gamma > 0.0) {
            return Err(bad("model.gamma", "must be positive"));
        }
        if let Some(g) = &self.run.gammas {
            if g.is_empty() {
                return Err(bad("run.gammas", "must not be empty"));
            }
            if g.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(bad("run.gammas", "entries must be positive"));
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(bad("run.gammas", "must be strictly increasing"));
            }
        }
        if let Some(grid) = &self.run.ep_grid {
            let pts = grid.points().map_err(|e| bad("run.ep_grid", e))?;
            if pts[0] <= 0.0 {
                return Err(bad("run.ep_grid.start", "must be positive"));
            }
        }
        if let Some(w) = self.run.window_rel {
            if !(w.is_finite() && w >= 0.0) {
                return Err(bad("run.window_rel", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn zeno_options(&self) -> ZenoOptions {
        self.run.window_rel.map(|w| ZenoOptions { window_rel: w }).unwrap_or_default()
    }
}
