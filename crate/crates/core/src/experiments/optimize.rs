use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-start simplex search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    /// Random starts in addition to any supplied warm starts.
    pub restarts: usize,
    /// Iteration budget per local search.
    pub budget: u64,
    /// Stop when the simplex cost spread falls below this.
    pub tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { restarts: 6, budget: 2000, tolerance: 1e-13 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::Config("optimizer budget must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("optimizer tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
}

struct Boxed<'a, F> {
    f: &'a F,
    bounds: &'a [(f64, f64)],
}

fn clamp(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect()
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Boxed<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        // Evaluate at the projection onto the box and charge the distance.
        let inside = clamp(x, self.bounds);
        let outside: f64 = x.iter().zip(&inside).map(|(a, b)| (a - b).powi(2)).sum();
        let v = (self.f)(&inside);
        Ok(if v.is_finite() { v + 1e3 * outside } else { f64::MAX })
    }
}

fn simplex(x0: &[f64], bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let mut pts = vec![x0.to_vec()];
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        let step = 0.1 * (hi - lo);
        let mut p = x0.to_vec();
        p[k] = if p[k] + step <= hi { p[k] + step } else { p[k] - step };
        pts.push(p);
    }
    pts
}

fn local_search<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    bounds: &[(f64, f64)],
    x0: &[f64],
    settings: &OptimizerSettings,
) -> Optimum {
    let x0 = clamp(x0, bounds);
    let fallback = || Optimum { value: f(&x0), x: x0.clone() };
    let solver = match NelderMead::new(simplex(&x0, bounds)).with_sd_tolerance(settings.tolerance) {
        Ok(s) => s,
        Err(_) => return fallback(),
    };
    let run = Executor::new(Boxed { f, bounds }, solver).configure(|s| s.max_iters(settings.budget)).run();
    match run {
        Ok(res) => match res.state().best_param.as_ref() {
            Some(p) => {
                let x = clamp(p, bounds);
                Optimum { value: f(&x), x }
            }
            None => fallback(),
        },
        Err(_) => fallback(),
    }
}

/// Minimizes `f` over a box from every warm start and `settings.restarts`
/// seeded uniform starts. Local searches run in parallel; the winner is the
/// lowest value, ties going to the earliest start.
pub fn minimize<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    bounds: &[(f64, f64)],
    warm: &[Vec<f64>],
    settings: &OptimizerSettings,
    seed: u64,
) -> Result<Optimum> {
    settings.validate()?;
    if bounds.is_empty() || bounds.iter().any(|&(lo, hi)| !(lo < hi)) {
        return Err(Error::InvalidParameter("optimizer bounds must be non-empty with lo < hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = warm.to_vec();
    for _ in 0..settings.restarts {
        starts.push(bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect());
    }
    if starts.is_empty() {
        return Err(Error::InvalidParameter("optimizer needs at least one start".into()));
    }
    let results: Vec<Optimum> = starts.par_iter().map(|x0| local_search(f, bounds, x0, settings)).collect();
    let mut best = results[0].clone();
    for r in results.into_iter().skip(1) {
        if r.value < best.value {
            best = r;
        }
    }
    Ok(best)
}
