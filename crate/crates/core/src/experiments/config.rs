use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HeatmapParams, OptimizerSettings, PerturbativeConstraint, SweepAxis};
use crate::entfilter::FilterSpec;
use crate::error::{Error, Result};
use crate::model::{BathSpec, MachineSpec, Temperature};

/// Declarative experiment file. Every section is optional and falls back to
/// its defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub steady: Option<SteadyConfig>,
    pub figure2: Option<Figure2Config>,
    pub figure3: Option<Figure3Config>,
    pub figure4b: Option<Figure4bConfig>,
    pub conjecture: Option<ConjectureConfig>,
    pub map_check: Option<MapCheckConfig>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn steady_or_default(&self) -> SteadyConfig {
        self.steady.clone().unwrap_or_default()
    }

    pub fn figure2_or_default(&self) -> Figure2Config {
        self.figure2.clone().unwrap_or_default()
    }

    pub fn figure3_or_default(&self) -> Figure3Config {
        self.figure3.clone().unwrap_or_default()
    }

    pub fn figure4b_or_default(&self) -> Figure4bConfig {
        self.figure4b.clone().unwrap_or_default()
    }

    pub fn conjecture_or_default(&self) -> ConjectureConfig {
        self.conjecture.clone().unwrap_or_default()
    }

    pub fn map_check_or_default(&self) -> MapCheckConfig {
        self.map_check.clone().unwrap_or_default()
    }
}

/// A single machine and its two baths, for one-shot solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyConfig {
    pub machine: MachineSpec,
    pub bath_a: BathSpec,
    pub bath_b: BathSpec,
    /// Defaults to Π_A = 1 − |d⟩⟨d|, Π_B = 1 − |0⟩⟨0|.
    #[serde(default)]
    pub filter: Option<FilterSpec>,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self {
            machine: MachineSpec::qutrit(3.0, 0.01, 0.01, 0.01).expect("valid default machine"),
            bath_a: BathSpec::reset(Temperature::Infinite, 0.002).expect("valid default bath"),
            bath_b: BathSpec::reset(Temperature::ZERO, 0.01).expect("valid default bath"),
            filter: None,
        }
    }
}

impl SteadyConfig {
    pub fn filter_spec(&self) -> Result<FilterSpec> {
        match &self.filter {
            Some(f) => FilterSpec::new(f.kept_a().to_vec(), f.kept_b().to_vec()),
            None => FilterSpec::qudit(self.machine.d()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure2Config {
    /// Gap ε used by the solver spot-checks.
    pub epsilon: f64,
    pub psuc: SweepAxis,
    /// Explicit targets; replaces `psuc` when present.
    pub psuc_values: Option<Vec<f64>>,
    pub constraint: PerturbativeConstraint,
    pub optimizer: OptimizerSettings,
    /// Penalty weights applied in turn, each stage warm-started from the last.
    pub penalty_weights: Vec<f64>,
    /// Largest accepted |p_suc/target − 1|.
    pub feasibility: f64,
    /// Re-evaluate every optimum with the numerical solver.
    pub solver_check: bool,
}

impl Default for Figure2Config {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            psuc: SweepAxis::log(1e-4, 0.3, 48),
            psuc_values: None,
            constraint: PerturbativeConstraint::default(),
            optimizer: OptimizerSettings { restarts: 6, budget: 3000, tolerance: 1e-14 },
            penalty_weights: vec![1e2, 1e4, 1e6],
            feasibility: 0.01,
            solver_check: true,
        }
    }
}

impl Figure2Config {
    pub fn targets(&self) -> Result<Vec<f64>> {
        let t = match &self.psuc_values {
            Some(v) => v.clone(),
            None => {
                self.psuc.validate("psuc")?;
                self.psuc.values()
            }
        };
        if t.is_empty() || t.iter().any(|&p| !(p > 0.0 && p <= 0.3)) {
            return Err(Error::Config("success-probability targets must lie in (0, 0.3]".into()));
        }
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.targets()?;
        self.constraint.validate()?;
        self.optimizer.validate()?;
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.penalty_weights.is_empty() || self.penalty_weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Config("penalty_weights must be non-empty and positive".into()));
        }
        if !(self.feasibility > 0.0) {
            return Err(Error::Config("feasibility must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureCurve {
    pub t_b: Temperature,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure3Config {
    pub curves: Vec<TemperatureCurve>,
    /// Hot-bath temperatures, swept in the given order.
    pub t_a: Vec<Temperature>,
    pub constraint: PerturbativeConstraint,
    pub optimizer: OptimizerSettings,
}

impl Default for Figure3Config {
    fn default() -> Self {
        let t = |v: f64| Temperature::new(v).expect("valid default temperature");
        Self {
            curves: vec![
                TemperatureCurve { t_b: Temperature::ZERO, epsilon: 3.0 },
                TemperatureCurve { t_b: t(0.1), epsilon: 3.0 },
                TemperatureCurve { t_b: t(0.1), epsilon: 1.0 },
            ],
            t_a: vec![t(0.5), t(1.0), t(2.0), t(5.0), t(10.0), t(50.0), t(1000.0), Temperature::Infinite],
            constraint: PerturbativeConstraint::default(),
            optimizer: OptimizerSettings { restarts: 6, budget: 1500, tolerance: 1e-12 },
        }
    }
}

impl Figure3Config {
    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() || self.t_a.is_empty() {
            return Err(Error::Config("figure3 needs at least one curve and one hot temperature".into()));
        }
        if self.curves.iter().any(|c| !(c.epsilon > 0.0)) {
            return Err(Error::Config("curve epsilon must be positive".into()));
        }
        if self.t_a.iter().any(|t| t.is_zero()) {
            return Err(Error::Config("hot-bath temperatures must be positive".into()));
        }
        self.constraint.validate()?;
        self.optimizer.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure4bConfig {
    pub t_a: SweepAxis,
    pub t_b: SweepAxis,
    pub params: HeatmapParams,
}

impl Default for Figure4bConfig {
    fn default() -> Self {
        Self {
            t_a: SweepAxis::log(0.1, 100.0, 41),
            t_b: SweepAxis::log(0.01, 10.0, 41),
            params: HeatmapParams::default(),
        }
    }
}

impl Figure4bConfig {
    pub fn validate(&self) -> Result<()> {
        self.t_a.validate("t_a")?;
        self.t_b.validate("t_b")?;
        if self.t_a.min <= 0.0 || self.t_b.min <= 0.0 {
            return Err(Error::Config("heatmap temperatures must be positive".into()));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjectureConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub mu: f64,
    pub p_b: f64,
    pub g: f64,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        Self { dims: vec![3, 4, 5], trials: 100, mu: 1e-3, p_b: 1e-2, g: 1e-2 }
    }
}

impl ConjectureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=6).contains(&d)) {
            return Err(Error::Config("conjecture dims must lie in 2..=6".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("conjecture needs at least one trial".into()));
        }
        if !(self.mu > 0.0 && self.p_b > 0.0 && self.g > 0.0) {
            return Err(Error::Config("mu, p_b and g must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapCheckConfig {
    pub draws: usize,
    pub epsilon: f64,
    /// Log-uniform range of reset rates.
    pub rates: (f64, f64),
    /// Log-uniform range of temperatures; draws with τ₀ > 2/3 are rejected.
    pub temperatures: (f64, f64),
}

impl Default for MapCheckConfig {
    fn default() -> Self {
        Self { draws: 20, epsilon: 3.0, rates: (1e-4, 1e-2), temperatures: (0.1, 100.0) }
    }
}

impl MapCheckConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo > 0.0 && lo < hi && hi.is_finite();
        if self.draws < 1 || !ok(self.rates) || !ok(self.temperatures) || !(self.epsilon > 0.0) {
            return Err(Error::Config("map_check needs draws >= 1, epsilon > 0 and positive ranges".into()));
        }
        Ok(())
    }
}
