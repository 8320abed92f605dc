use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Boundary, TableConfig, DEFAULT_SIDE};
use crate::paired::{PerturbationSpec, DEFAULT_MAX_SHOCKS_PER_BALL};
use crate::seeds::sha256_hex;

/// Overrides the worker count of sweeps and figure pipelines.
pub const WORKERS_ENV: &str = "TWIN_BILLIARD_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableSpec {
    pub side: f64,
    pub boundary: Boundary,
    pub count_wall_shocks: bool,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            side: DEFAULT_SIDE,
            boundary: Boundary::Walls,
            count_wall_shocks: false,
        }
    }
}

/// Sweep grid. Radii, when given, replace the void-ratio rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxes {
    pub epsilon_exps: Vec<u32>,
    pub n_balls: Vec<usize>,
    pub void_ratio: f64,
    pub radii: Vec<f64>,
}

impl Default for SweepAxes {
    fn default() -> Self {
        Self {
            epsilon_exps: vec![15, 20, 25, 30, 35],
            n_balls: vec![16, 32, 64, 128, 256, 512],
            void_ratio: 0.33,
            radii: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: u32,
    pub max_shocks_per_ball: f64,
    pub record_traces: bool,
    /// Worker threads; 0 means one per core. The environment variable
    /// [`WORKERS_ENV`] takes precedence.
    pub workers: usize,
    pub table: TableSpec,
    pub sweep: SweepAxes,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 200,
            max_shocks_per_ball: DEFAULT_MAX_SHOCKS_PER_BALL,
            record_traces: false,
            workers: 0,
            table: TableSpec::default(),
            sweep: SweepAxes::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML rendering; the worker count is left out because it has
    /// no effect on results.
    pub fn canonical_toml(&self) -> String {
        let mut c = self.clone();
        c.workers = 0;
        toml::to_string(&c).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_toml().as_bytes())
    }

    /// Table for one sweep cell.
    pub fn table_for(&self, n_balls: usize, radius: Option<f64>) -> TableConfig {
        let side = self.table.side;
        let radius = radius
            .unwrap_or_else(|| side * (self.sweep.void_ratio / (std::f64::consts::PI * n_balls as f64)).sqrt());
        TableConfig {
            side,
            radius,
            n_balls,
            boundary: self.table.boundary,
            count_wall_shocks: self.table.count_wall_shocks,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if s.epsilon_exps.is_empty() || s.n_balls.is_empty() {
            return Err(Error::Config("sweep grids must not be empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.max_shocks_per_ball > 0.0) {
            return Err(Error::Config("max_shocks_per_ball must be positive".into()));
        }
        if s.radii.is_empty() && !(s.void_ratio > 0.0) {
            return Err(Error::Config("void_ratio must be positive".into()));
        }
        for &k in &s.epsilon_exps {
            PerturbationSpec::new(k, 0)?;
        }
        for &n in &s.n_balls {
            if s.radii.is_empty() {
                self.table_for(n, None).validate()?;
            }
            for &r in &s.radii {
                self.table_for(n, Some(r)).validate()?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = ExperimentConfig::from_toml(
            "seed = 9\ntrials = 3\n[sweep]\nepsilon_exps = [10]\nn_balls = [16, 32]\n[table]\nboundary = \"periodic\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.sweep.void_ratio, 0.33);
        assert_eq!(cfg.table.boundary, Boundary::Periodic);
        assert_eq!(ExperimentConfig::from_toml(&cfg.canonical_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("[sweep]\nepsilon_exps = []\n").is_err());
        assert!(ExperimentConfig::from_toml("[sweep]\nepsilon_exps = [2]\n").is_err());
        assert!(ExperimentConfig::from_toml("trials = 0\n").is_err());
        assert!(ExperimentConfig::from_toml("bogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("[sweep]\nvoid_ratio = 0.95\n").is_err());
    }

    #[test]
    fn hash_ignores_workers() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { workers: 8, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig { seed: 2, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn void_ratio_sets_radius() {
        let cfg = ExperimentConfig::default();
        let t = cfg.table_for(128, None);
        assert!((t.void_ratio() - 0.33).abs() < 1e-12);
        assert_eq!(cfg.table_for(128, Some(4.0)).radius, 4.0);
    }
}
