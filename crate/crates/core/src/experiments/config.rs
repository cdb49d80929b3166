use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::{InflationCase, Regime};
use crate::error::{Error, Result};
use crate::picard::{QuadratureSpec, SamplerSpec};
use crate::solver::DEFAULT_CFL;

/// Grid planning limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Minimum `L` in the period `2πL`; raised when the case needs more room.
    pub length_scale: u32,
    pub max_points: usize,
    /// Rows whose predicted peak exceeds this are rejected.
    pub memory_budget_mb: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { length_scale: 1, max_points: 1 << 23, memory_budget_mb: 3072.0 }
    }
}

/// One construction family and the `N` values to run it at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub regime: Regime,
    #[serde(default)]
    pub n_list: Vec<u32>,
    pub delta: f64,
    pub q: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Placement exponent; `1` keeps qlt2 grids small enough for N-sweeps.
    #[serde(default = "default_c")]
    pub c: u32,
    /// Overrides `grid.length_scale` for this family.
    #[serde(default)]
    pub length_scale: Option<u32>,
}

fn default_eps() -> f64 {
    0.01
}

fn default_c() -> u32 {
    2
}

impl CaseConfig {
    pub fn case(&self, n: u32) -> Result<InflationCase> {
        InflationCase::new(self.regime, n, self.delta, self.q, self.eps, self.c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub enabled: bool,
    /// Step is `t₀ / dt_divisor`.
    pub dt_divisor: f64,
    pub cfl: f64,
    pub sample_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { enabled: false, dt_divisor: 2048.0, cfl: DEFAULT_CFL, sample_every: 64 }
    }
}

/// Sweep execution and the random-pair study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub workers: usize,
    pub seed: u64,
    /// Write wall-clock seconds into the CSV (breaks byte-identical reruns).
    pub record_timing: bool,
    /// RMS log-residual above which a fit gives no verdict.
    pub residual_threshold: f64,
    pub trials: usize,
    /// Norm exponents `q` measured by `q2-bound`.
    pub q_values: Vec<f64>,
    /// `N` values for the random pairs.
    pub n_list: Vec<u32>,
    /// Observation times are `t₀(N)` times these factors.
    pub time_factors: Vec<f64>,
    pub sampler: SamplerSpec,
    /// Construction families included in `q2-bound`.
    pub family: Vec<CaseConfig>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            seed: 0,
            record_timing: false,
            residual_threshold: 0.1,
            trials: 200,
            q_values: vec![2.0, 1.0],
            n_list: Vec::new(),
            time_factors: vec![1.0],
            sampler: SamplerSpec::default(),
            family: Vec::new(),
        }
    }
}

/// Whole experiment description, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub grid: GridConfig,
    pub case: Option<CaseConfig>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.sweep.workers == 0 {
            return Err(Error::Config("sweep.workers must be at least 1".into()));
        }
        if !(self.solver.dt_divisor >= 1.0) {
            return Err(Error::Config("solver.dt_divisor must be >= 1".into()));
        }
        if !(self.solver.cfl > 0.0) {
            return Err(Error::Config("solver.cfl must be positive".into()));
        }
        if self.sweep.time_factors.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::Config("sweep.time_factors must be positive".into()));
        }
        if !(self.grid.memory_budget_mb > 0.0) {
            return Err(Error::Config("grid.memory_budget_mb must be positive".into()));
        }
        Ok(())
    }

    /// The `[case]` section, required by `inflate` and `solve`.
    pub fn require_case(&self) -> Result<&CaseConfig> {
        self.case.as_ref().ok_or_else(|| Error::Config("missing [case] section".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_round_trip() {
        let cfg = Config::from_toml(
            "[case]\nregime = \"qgt2\"\nn_list = [6, 7]\ndelta = 0.1\nq = 4.0\n",
        )
        .unwrap();
        assert_eq!(cfg.require_case().unwrap().c, 2);
        assert_eq!(cfg.quadrature, QuadratureSpec::default());
        let back = Config::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(Config::from_toml("[grid]\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(Config::from_toml("[sweep]\nworkers = 0\n").is_err());
    }
}
