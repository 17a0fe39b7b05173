//! Run configuration: objective weights, support pruning and solver knobs.
//!
//! Loaded from TOML; every section and field is optional and falls back to
//! its default.

use serde::{Deserialize, Serialize};

use crate::attrspace::AttrKind;
use crate::error::{Error, Result};

/// Per-attribute scalar map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttrValues {
    pub p: f64,
    pub z: f64,
    pub w: f64,
    pub h: f64,
    pub o: f64,
}

impl AttrValues {
    pub fn uniform(v: f64) -> Self {
        AttrValues { p: v, z: v, w: v, h: v, o: v }
    }

    pub fn get(&self, kind: AttrKind) -> f64 {
        match kind {
            AttrKind::P => self.p,
            AttrKind::Z => self.z,
            AttrKind::W => self.w,
            AttrKind::H => self.h,
            AttrKind::O => self.o,
        }
    }
}

impl Default for AttrValues {
    fn default() -> Self {
        AttrValues::uniform(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// omega_a = mean over components of the nearest-candidate residual.
    Auto,
    /// omega values are taken from the config as-is.
    Manual,
}

/// Category-count penalty weights (the omega of the regularization term).
///
/// In manual mode every omega left unspecified defaults to 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Weights {
    pub mode: WeightMode,
    pub omega: AttrValues,
}

impl Weights {
    pub fn manual(omega: AttrValues) -> Self {
        Weights { mode: WeightMode::Manual, omega }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights { mode: WeightMode::Auto, omega: AttrValues::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PruningConfig {
    /// Support radius as a multiple of the clustering threshold delta.
    /// `inf` disables pruning.
    pub prune_radius_factor: f64,
}

impl Default for PruningConfig {
    fn default() -> Self {
        PruningConfig { prune_radius_factor: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub time_limit_s: f64,
    pub workers: usize,
    pub log_level: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { time_limit_s: 300.0, workers: 1, log_level: "warn".into() }
    }
}

/// Full regularization configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub weights: Weights,
    pub pruning: PruningConfig,
    pub solver: SolverConfig,
    /// Optional per-attribute scale applied to the data term.
    pub data_scale: AttrValues,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = Config::default();
        assert_eq!(cfg.pruning.prune_radius_factor, 5.0);
        assert_eq!(cfg.solver.time_limit_s, 300.0);
        assert_eq!(cfg.solver.workers, 1);
        assert_eq!(cfg.weights.mode, WeightMode::Auto);
        assert_eq!(cfg.data_scale, AttrValues::uniform(1.0));
    }

    #[test]
    fn parse_partial_toml() {
        let cfg = Config::from_toml(
            r#"
            [weights]
            mode = "manual"
            [weights.omega]
            p = 0.1
            z = 0.2
            [pruning]
            prune_radius_factor = inf
            [solver]
            time_limit_s = 10.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.weights.mode, WeightMode::Manual);
        assert_eq!(cfg.weights.omega.p, 0.1);
        assert_eq!(cfg.weights.omega.z, 0.2);
        assert_eq!(cfg.weights.omega.w, 1.0);
        assert!(cfg.pruning.prune_radius_factor.is_infinite());
        assert_eq!(cfg.solver.time_limit_s, 10.0);
        assert_eq!(cfg.solver.workers, 1);
    }

    #[test]
    fn unknown_section_rejected() {
        assert!(Config::from_toml("[nope]\nx = 1\n").is_err());
    }
}
