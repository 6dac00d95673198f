use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use super::{join, ConjectureConfig, FigureRecord, RecordStatus};
use crate::analytic::{schmidt_machine, SchmidtTarget};
use crate::dynamics::{reset_machine, steady_state};
use crate::entfilter::{apply_filter, fidelity_target, negativity, FilterSpec};
use crate::error::{Error, Result};
use crate::model::Temperature;

/// Schmidt coefficients whose squares are flat-Dirichlet distributed, i.e.
/// uniform on the positive orthant of the unit sphere.
pub fn dirichlet_schmidt<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<SchmidtTarget> {
    let w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    SchmidtTarget::new(w.iter().map(|x| (x / total).sqrt()).collect()).or_else(|_| {
        // Rounding can leave Σλ² a few ulps from one.
        SchmidtTarget::normalized(&w.iter().map(|x| x.sqrt()).collect::<Vec<_>>())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub d: usize,
    pub trials: usize,
    pub min_fidelity: f64,
    pub median_fidelity: f64,
    pub failures: usize,
    #[serde(skip)]
    pub records: Vec<FigureRecord>,
}

fn trial(cfg: &ConjectureConfig, index: usize, target: &SchmidtTarget) -> Result<FigureRecord> {
    let d = target.d();
    let spec = schmidt_machine(target, cfg.g)?;
    let p_b = cfg.p_b;
    let p_a = cfg.mu * p_b;
    let mut rec = FigureRecord::new("conjecture", index, "reset", &spec, Temperature::Infinite, Temperature::ZERO);
    rec.rate_a = p_a;
    rec.rate_b = p_b;
    rec.schmidt = Some(join(target.lambdas()));
    let solved =
        reset_machine(&spec, Temperature::Infinite, Temperature::ZERO, p_a, p_b).and_then(|l| steady_state(&l));
    let ss = match solved {
        Ok(ss) => ss,
        Err(e) => {
            rec.fail(RecordStatus::Error, &e);
            return Ok(rec);
        }
    };
    rec.kernel_gap = Some(ss.kernel_gap);
    rec.residual = Some(ss.residual);
    match apply_filter(&ss.state, &FilterSpec::qudit(d)?) {
        Ok((rho, p)) => {
            rec.p_suc = Some(p);
            rec.fidelity = Some(fidelity_target(&rho, &target.filtered_vector())?);
            rec.negativity = Some(negativity(&rho)?);
        }
        Err(e) => rec.fail(RecordStatus::FilterFailed, &e),
    }
    Ok(rec)
}

/// Solves the Schmidt machine for `cfg.trials` random targets of Schmidt
/// rank ≤ d at maximal gradient and reports the fidelity of each filtered
/// state with its target.
pub fn conjecture_batch(d: usize, cfg: &ConjectureConfig, seed: u64) -> Result<ConjectureReport> {
    cfg.validate()?;
    if d < 2 {
        return Err(Error::InvalidParameter(format!("conjecture needs d >= 2, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<SchmidtTarget> = (0..cfg.trials).map(|_| dirichlet_schmidt(d, &mut rng)).collect::<Result<_>>()?;
    let records: Vec<FigureRecord> =
        targets.par_iter().enumerate().map(|(i, t)| trial(cfg, i, t)).collect::<Result<_>>()?;
    let mut fid: Vec<f64> = records.iter().map(|r| r.fidelity.unwrap_or(0.0)).collect();
    fid.sort_by(f64::total_cmp);
    let n = fid.len();
    let median = if n % 2 == 1 { fid[n / 2] } else { 0.5 * (fid[n / 2 - 1] + fid[n / 2]) };
    Ok(ConjectureReport {
        d,
        trials: n,
        min_fidelity: fid[0],
        median_fidelity: median,
        failures: records.iter().filter(|r| r.status != RecordStatus::Ok).count(),
        records,
    })
}
