use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minimize, Figure2Config, FigureRecord, RecordStatus};
use crate::analytic::{filtered_qutrit_state, psi_plus, qutrit_psuc, QutritCouplings};
use crate::dynamics::{reset_machine, steady_state};
use crate::entfilter::{apply_filter, chsh_max, fidelity_target, negativity, signed_negativity, FilterSpec};
use crate::error::{Error, Result};
use crate::linalg::DensityOperator;
use crate::model::Temperature;

/// Quantity maximized at each success probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierObjective {
    Negativity,
    Chsh,
}

impl FrontierObjective {
    pub fn name(&self) -> &'static str {
        match self {
            FrontierObjective::Negativity => "negativity",
            FrontierObjective::Chsh => "chsh",
        }
    }

    /// Level at which the score stops certifying entanglement or nonlocality.
    pub fn threshold(&self) -> f64 {
        match self {
            FrontierObjective::Negativity => 0.0,
            FrontierObjective::Chsh => 2.0,
        }
    }

    fn score(&self, rho: &DensityOperator) -> Result<f64> {
        match self {
            FrontierObjective::Negativity => signed_negativity(rho),
            FrontierObjective::Chsh => chsh_max(rho),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierReport {
    #[serde(skip)]
    pub records: Vec<FigureRecord>,
    /// p_suc where the optimized negativity reaches zero.
    pub negativity_crossing: Option<f64>,
    /// p_suc where the optimized CHSH value drops to 2.
    pub chsh_crossing: Option<f64>,
    /// Optimized values at the smallest target.
    pub negativity_at_min_target: Option<f64>,
    pub chsh_at_min_target: Option<f64>,
    pub infeasible: usize,
    pub solver_mismatches: usize,
}

const COUPLINGS: QutritCouplings = QutritCouplings::Equal;

fn closed_form(x: &[f64]) -> Result<(DensityOperator, f64)> {
    let [g, p_a, p_b] = [x[0], x[1], x[2]].map(|v| 10f64.powf(v));
    let rho = filtered_qutrit_state(g, COUPLINGS, p_a, p_b)?.density()?;
    Ok((rho, qutrit_psuc(g, COUPLINGS, p_a, p_b)?))
}

/// First p_suc (sorted ascending) at which `points` falls below `level`,
/// linearly interpolated between the bracketing samples.
pub fn crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|(p, s)| p.is_finite() && s.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).find(|w| w[0].1 >= level && w[1].1 < level).map(|w| {
        let ((p0, s0), (p1, s1)) = (w[0], w[1]);
        p0 + (level - s0) * (p1 - p0) / (s1 - s0)
    })
}

fn optimize_point(
    cfg: &Figure2Config,
    target: f64,
    objective: FrontierObjective,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    let (lo, hi) = cfg.constraint.log_bounds(cfg.epsilon);
    let bounds = [(lo, hi); 3];
    let mut warm: Vec<Vec<f64>> = Vec::new();
    let mut best = None;
    for (stage, &w) in cfg.penalty_weights.iter().enumerate() {
        let cost = |x: &[f64]| match closed_form(x) {
            Ok((rho, p)) => match objective.score(&rho) {
                Ok(s) => -s + w * (p / target).ln().powi(2),
                Err(_) => f64::NAN,
            },
            Err(_) => f64::NAN,
        };
        let opt = minimize(&cost, &bounds, &warm, &cfg.optimizer, seed.wrapping_add(stage as u64))?;
        warm = vec![opt.x.clone()];
        best = Some(opt);
    }
    let best = best.ok_or_else(|| Error::Config("no penalty stages".into()))?;
    let (_, p) = closed_form(&best.x)?;
    Ok((best.x, p))
}

fn solver_negativity(cfg: &Figure2Config, x: &[f64]) -> Result<(f64, f64, f64)> {
    let [g, p_a, p_b] = [x[0], x[1], x[2]].map(|v| 10f64.powf(v));
    let spec = COUPLINGS.machine(cfg.epsilon, g)?;
    let ss = steady_state(&reset_machine(&spec, Temperature::Infinite, Temperature::ZERO, p_a, p_b)?)?;
    let (rho, _) = apply_filter(&ss.state, &FilterSpec::qutrit())?;
    Ok((negativity(&rho)?, ss.kernel_gap, ss.residual))
}

fn frontier_point(
    cfg: &Figure2Config,
    index: usize,
    target: f64,
    objective: FrontierObjective,
    seed: u64,
) -> FigureRecord {
    let placeholder = COUPLINGS.machine(cfg.epsilon, 0.0).expect("zero coupling is valid");
    let mut rec = FigureRecord::new("figure2", index, "reset", &placeholder, Temperature::Infinite, Temperature::ZERO);
    rec.objective = Some(objective.name().into());
    rec.target_psuc = Some(target);
    let (x, p) = match optimize_point(cfg, target, objective, seed) {
        Ok(v) => v,
        Err(e) => {
            rec.fail(RecordStatus::Error, &e);
            return rec;
        }
    };
    let [g, p_a, p_b] = [x[0], x[1], x[2]].map(|v| 10f64.powf(v));
    if let Ok(spec) = COUPLINGS.machine(cfg.epsilon, g) {
        rec.couplings = super::join(&super::couplings_of(&spec));
    }
    rec.rate_a = p_a;
    rec.rate_b = p_b;
    rec.p_suc = Some(p);
    let evaluated = closed_form(&x).and_then(|(rho, _)| {
        Ok((negativity(&rho)?, objective.score(&rho)?, chsh_max(&rho)?, fidelity_target(&rho, &psi_plus())?))
    });
    match evaluated {
        Ok((n, s, c, f)) => {
            rec.negativity = Some(n);
            rec.score = Some(s);
            rec.chsh = Some(c);
            rec.fidelity = Some(f);
        }
        Err(e) => {
            rec.fail(RecordStatus::Error, &e);
            return rec;
        }
    }
    if (p / target - 1.0).abs() > cfg.feasibility {
        rec.status = RecordStatus::Infeasible;
        rec.message = Some(format!("p_suc {p:.4e} misses target {target:.4e}"));
        return rec;
    }
    if cfg.solver_check {
        match solver_negativity(cfg, &x) {
            Ok((n, gap, res)) => {
                rec.solver_negativity = Some(n);
                rec.kernel_gap = Some(gap);
                rec.residual = Some(res);
                let closed = rec.negativity.unwrap_or(f64::NAN);
                if !((n - closed).abs() <= 1e-6) {
                    rec.status = RecordStatus::SolverMismatch;
                    rec.message = Some(format!("solver negativity {n:.8} vs closed form {closed:.8}"));
                }
            }
            Err(e) => rec.fail(RecordStatus::SolverMismatch, &e),
        }
    }
    rec
}

/// Maximizes negativity, and separately the CHSH value, over (g, p_A, p_B)
/// at each target success probability of the equal-coupling qutrit machine
/// at maximal gradient. Objectives come from the closed forms; every optimum
/// is re-solved numerically.
pub fn tradeoff_frontier(cfg: &Figure2Config, seed: u64) -> Result<FrontierReport> {
    cfg.validate()?;
    let targets = cfg.targets()?;
    let jobs: Vec<(usize, f64, FrontierObjective)> = [FrontierObjective::Negativity, FrontierObjective::Chsh]
        .into_iter()
        .flat_map(|o| targets.iter().map(move |&t| (o, t)))
        .enumerate()
        .map(|(i, (o, t))| (i, t, o))
        .collect();
    let records: Vec<FigureRecord> =
        jobs.par_iter().map(|&(i, t, o)| frontier_point(cfg, i, t, o, seed.wrapping_add(1000 * i as u64))).collect();

    let curve = |o: FrontierObjective| -> Vec<(f64, f64)> {
        records
            .iter()
            .filter(|r| r.objective.as_deref() == Some(o.name()) && r.status == RecordStatus::Ok)
            .filter_map(|r| Some((r.p_suc?, r.score?)))
            .collect()
    };
    let at_min = |o: FrontierObjective| -> Option<f64> {
        let mut c = curve(o);
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c.first().map(|&(_, s)| s)
    };
    Ok(FrontierReport {
        negativity_crossing: crossing(&curve(FrontierObjective::Negativity), 0.0),
        chsh_crossing: crossing(&curve(FrontierObjective::Chsh), 2.0),
        negativity_at_min_target: at_min(FrontierObjective::Negativity),
        chsh_at_min_target: at_min(FrontierObjective::Chsh),
        infeasible: records.iter().filter(|r| r.status == RecordStatus::Infeasible).count(),
        solver_mismatches: records.iter().filter(|r| r.status == RecordStatus::SolverMismatch).count(),
        records,
    })
}
