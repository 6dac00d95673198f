//! Sweeps, constrained optimization and figure data.

mod config;
mod conjecture;
mod figure2;
mod figure3;
mod figure4b;
mod oneshot;
mod optimize;
pub mod verify;

pub use config::{
    Config, ConjectureConfig, Figure2Config, Figure3Config, Figure4bConfig, MapCheckConfig, SteadyConfig,
    TemperatureCurve,
};
pub use conjecture::{conjecture_batch, dirichlet_schmidt, ConjectureReport};
pub use figure2::{crossing, tradeoff_frontier, FrontierObjective, FrontierReport};
pub use figure3::{finite_temperature_sweep, Figure3Curve};
pub use figure4b::{lindblad_heatmap, HeatmapParams, HeatmapReport};
pub use oneshot::{filter_machine, map_check, solve_machine, FilterOutcome, MapCheckReport, MapDraw, SteadyOutcome};
pub use optimize::{minimize, OptimizerSettings, Optimum};

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{lindblad_machine, reset_machine, Liouvillian, LocalRates};
use crate::error::{Error, Result};
use crate::mapping::{bosonic_local_rates, thermal_reset_to_lindblad};
use crate::model::{BathCoupling, BathSpec, EnergyLadder, Interaction, MachineSpec, Temperature};

/// Upper bound η·min(1, ε) on couplings and bath rates, with a lower bound
/// `lower_ratio` times that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbativeConstraint {
    pub eta: f64,
    pub lower_ratio: f64,
}

impl Default for PerturbativeConstraint {
    fn default() -> Self {
        Self { eta: 1e-2, lower_ratio: 1e-4 }
    }
}

impl PerturbativeConstraint {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.lower_ratio > 0.0 && self.lower_ratio < 1.0) {
            return Err(Error::Config(format!("lower_ratio must lie in (0, 1), got {}", self.lower_ratio)));
        }
        Ok(())
    }

    pub fn upper(&self, epsilon: f64) -> f64 {
        self.eta * epsilon.min(1.0)
    }

    /// Bounds on log10 of each parameter.
    pub fn log_bounds(&self, epsilon: f64) -> (f64, f64) {
        let hi = self.upper(epsilon);
        ((hi * self.lower_ratio).log10(), hi.log10())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// A swept axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points, spacing: Spacing::Log }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("axis {name} needs at least 2 points")));
        }
        if !(self.min < self.max && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!("axis {name} needs finite min < max")));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::Config(format!("log axis {name} needs min > 0")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Infeasible,
    FilterFailed,
    SolverMismatch,
    Error,
}

/// One output row. `rate_a`/`rate_b` are reset rates for the reset model
/// and bosonic couplings Γ_A, Γ_B for the Lindblad model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRecord {
    pub experiment: String,
    pub index: usize,
    pub objective: Option<String>,
    pub status: RecordStatus,
    pub model: String,
    pub d: usize,
    pub epsilon: f64,
    pub t_a: Temperature,
    pub t_b: Temperature,
    pub couplings: String,
    pub rate_a: f64,
    pub rate_b: f64,
    pub rate_b12: Option<f64>,
    pub dephasing: Option<f64>,
    pub target_psuc: Option<f64>,
    pub p_suc: Option<f64>,
    pub negativity: Option<f64>,
    pub score: Option<f64>,
    pub chsh: Option<f64>,
    pub fidelity: Option<f64>,
    pub solver_negativity: Option<f64>,
    pub kernel_gap: Option<f64>,
    pub residual: Option<f64>,
    pub schmidt: Option<String>,
    pub message: Option<String>,
}

impl FigureRecord {
    pub fn new(
        experiment: &str,
        index: usize,
        model: &str,
        spec: &MachineSpec,
        t_a: Temperature,
        t_b: Temperature,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            index,
            objective: None,
            status: RecordStatus::Ok,
            model: model.to_string(),
            d: spec.d(),
            epsilon: spec.gaps.get(1).copied().unwrap_or(1.0),
            t_a,
            t_b,
            couplings: join(&couplings_of(spec)),
            rate_a: 0.0,
            rate_b: 0.0,
            rate_b12: None,
            dephasing: None,
            target_psuc: None,
            p_suc: None,
            negativity: None,
            score: None,
            chsh: None,
            fidelity: None,
            solver_negativity: None,
            kernel_gap: None,
            residual: None,
            schmidt: None,
            message: None,
        }
    }

    pub fn fail(&mut self, status: RecordStatus, err: &Error) {
        self.status = status;
        self.message = Some(format!("{}: {err}", err.kind()));
    }
}

pub(crate) fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";")
}

pub(crate) fn couplings_of(spec: &MachineSpec) -> Vec<f64> {
    match &spec.interaction {
        Interaction::Qutrit { g1, g2, g3 } => vec![*g1, *g2, *g3],
        Interaction::Ladder { couplings } => couplings.clone(),
    }
}

fn local_rates(bath: &BathSpec, ladder: &EnergyLadder) -> Result<LocalRates> {
    match &bath.coupling {
        BathCoupling::Reset { rate } => thermal_reset_to_lindblad(*rate, ladder, bath.temperature),
        BathCoupling::Lindblad(table) => Ok(table.clone()),
        BathCoupling::Bosonic { rate, dephasing, scaled } => bosonic_local_rates(
            ladder,
            bath.temperature,
            |m, n| {
                let factor = scaled.iter().find(|s| s.lower == m && s.upper == n).map_or(1.0, |s| s.factor);
                rate * factor
            },
            *dephasing,
        ),
    }
}

/// Generator of a machine coupled to two baths. Two reset baths give the
/// reset model; otherwise every bath is expressed as a Lindblad rate table,
/// with reset baths translated through the exact qutrit mapping.
pub fn machine_liouvillian(spec: &MachineSpec, bath_a: &BathSpec, bath_b: &BathSpec) -> Result<Liouvillian> {
    match (&bath_a.coupling, &bath_b.coupling) {
        (BathCoupling::Reset { rate: pa }, BathCoupling::Reset { rate: pb }) => {
            reset_machine(spec, bath_a.temperature, bath_b.temperature, *pa, *pb)
        }
        _ => {
            let ra = local_rates(bath_a, &spec.ladder_a()?)?;
            let rb = local_rates(bath_b, &spec.ladder_b()?)?;
            lindblad_machine(spec, &ra, &rb)
        }
    }
}

/// Writes records as CSV (header row, comma separator, LF endings).
pub fn write_csv<W: Write>(records: &[FigureRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<FigureRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    r.deserialize().map(|row| row.map_err(|e| Error::Io(e.to_string()))).collect()
}

/// Path of the JSON sidecar next to a CSV output.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `records` to `path` and a JSON sidecar carrying the resolved
/// configuration, seed, library version and a summary.
pub fn write_outputs(
    path: &Path,
    experiment: &str,
    records: &[FigureRecord],
    config: &Config,
    summary: serde_json::Value,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))?;
    let sidecar = serde_json::json!({
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment,
        "rows": records.len(),
        "config": config,
        "summary": summary,
    });
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(sidecar_path(path), text + "\n")?;
    Ok(())
}
