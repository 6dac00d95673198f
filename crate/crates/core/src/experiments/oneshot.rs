use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{machine_liouvillian, MapCheckConfig, SteadyConfig};
use crate::analytic::SchmidtTarget;
use crate::dynamics::{lindblad_machine, reset_machine, steady_state, SteadyState};
use crate::entfilter::{apply_filter, report, EntanglementReport};
use crate::error::{Error, Result};
use crate::mapping::{bosonic_rates, generator_discrepancy, thermal_reset_to_lindblad, MAX_POPULATION};
use crate::model::{thermal_populations, MachineSpec, Temperature};

#[derive(Debug, Clone, Serialize)]
pub struct SteadyOutcome {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Diagonal of ρ̄, index a·dim_b + b.
    pub populations: Vec<f64>,
    /// Largest |ρ̄_ij| off the diagonal.
    pub max_coherence: f64,
    pub purity: f64,
    pub kernel_gap: f64,
    pub residual: f64,
    pub smallest_singular: f64,
}

impl SteadyOutcome {
    fn from_state(ss: &SteadyState) -> Self {
        let m = ss.state.matrix();
        let mut max_coherence = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    max_coherence = max_coherence.max(m[(i, j)].norm());
                }
            }
        }
        let shape = ss.state.shape();
        Self {
            dim_a: shape.dim_a,
            dim_b: shape.dim_b,
            populations: ss.state.populations(),
            max_coherence,
            purity: ss.state.purity(),
            kernel_gap: ss.kernel_gap,
            residual: ss.residual,
            smallest_singular: ss.smallest_singular,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    pub steady: SteadyOutcome,
    pub kept_a: Vec<usize>,
    pub kept_b: Vec<usize>,
    pub p_suc: f64,
    /// Fidelity is against the maximally entangled target of the kept space.
    pub report: EntanglementReport,
    /// Filtered state, row-major real and imaginary parts.
    pub state_re: Vec<Vec<f64>>,
    pub state_im: Vec<Vec<f64>>,
}

fn solve(cfg: &SteadyConfig) -> Result<SteadyState> {
    cfg.machine.validate()?;
    steady_state(&machine_liouvillian(&cfg.machine, &cfg.bath_a, &cfg.bath_b)?)
}

/// Steady state of the configured machine.
pub fn solve_machine(cfg: &SteadyConfig) -> Result<SteadyOutcome> {
    Ok(SteadyOutcome::from_state(&solve(cfg)?))
}

/// Steady state followed by the configured local filter.
pub fn filter_machine(cfg: &SteadyConfig) -> Result<FilterOutcome> {
    let ss = solve(cfg)?;
    let f = cfg.filter_spec()?;
    let (rho, p_suc) = apply_filter(&ss.state, &f)?;
    let shape = rho.shape();
    let target = if shape.dim_a == shape.dim_b {
        Some(SchmidtTarget::maximally_entangled(shape.dim_a)?.filtered_vector())
    } else {
        None
    };
    let m = rho.matrix();
    let rows = |part: fn(&crate::linalg::C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)])).collect()).collect()
    };
    Ok(FilterOutcome {
        steady: SteadyOutcome::from_state(&ss),
        kept_a: f.kept_a().to_vec(),
        kept_b: f.kept_b().to_vec(),
        p_suc,
        report: report(&rho, target.as_ref())?,
        state_re: rows(|z| z.re),
        state_im: rows(|z| z.im),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MapDraw {
    pub p_a: f64,
    pub p_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub g: [f64; 3],
    /// Largest entry of (L_reset − L_mapped) σ over the Hermitian basis.
    pub discrepancy: f64,
    /// Largest |Γ⁺/Γ⁻ − e^{−ΔE/T}| over both baths, mapped and bosonic.
    pub detailed_balance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapCheckReport {
    pub draws: Vec<MapDraw>,
    pub max_discrepancy: f64,
    pub max_detailed_balance: f64,
    /// Draws rejected because some τ_k exceeded 2/3.
    pub rejected: usize,
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn detailed_balance_error(spec: &MachineSpec, p_a: f64, p_b: f64, t_a: f64, t_b: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for (ladder, p, t) in [(spec.ladder_a()?, p_a, t_a), (spec.ladder_b()?, p_b, t_b)] {
        let temp = Temperature::new(t)?;
        let mapped = thermal_reset_to_lindblad(p, &ladder, temp)?;
        for tr in &mapped.transitions {
            let de = ladder.gap(tr.lower, tr.upper);
            let boltzmann = (-de / t).exp();
            let (up, down) = bosonic_rates(1.0, de, temp)?;
            worst = worst.max((tr.up / tr.down - boltzmann).abs()).max((up / down - boltzmann).abs());
        }
    }
    Ok(worst)
}

/// Compares the reset generator with the generator built from the mapped
/// Lindblad rates on random qutrit machines, and checks detailed balance of
/// the mapped and bosonic rates.
pub fn map_check(cfg: &MapCheckConfig, seed: u64) -> Result<MapCheckReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(cfg.draws);
    let mut rejected = 0;
    while draws.len() < cfg.draws {
        if rejected > 1000 * cfg.draws {
            return Err(Error::Config("map_check temperature range yields no admissible draws".into()));
        }
        let (p_a, p_b) = (log_uniform(&mut rng, cfg.rates), log_uniform(&mut rng, cfg.rates));
        let (t_a, t_b) = (log_uniform(&mut rng, cfg.temperatures), log_uniform(&mut rng, cfg.temperatures));
        let g = [(); 3].map(|_| log_uniform(&mut rng, cfg.rates));
        let spec = MachineSpec::qutrit(cfg.epsilon, g[0], g[1], g[2])?;
        let (ta, tb) = (Temperature::new(t_a)?, Temperature::new(t_b)?);
        let admissible = [(spec.ladder_a()?, ta), (spec.ladder_b()?, tb)]
            .iter()
            .all(|(l, t)| thermal_populations(l, *t).iter().all(|&v| v <= MAX_POPULATION));
        if !admissible {
            rejected += 1;
            continue;
        }
        let reset = reset_machine(&spec, ta, tb, p_a, p_b)?;
        let mapped = lindblad_machine(
            &spec,
            &thermal_reset_to_lindblad(p_a, &spec.ladder_a()?, ta)?,
            &thermal_reset_to_lindblad(p_b, &spec.ladder_b()?, tb)?,
        )?;
        draws.push(MapDraw {
            p_a,
            p_b,
            t_a,
            t_b,
            g,
            discrepancy: generator_discrepancy(reset.matrix(), mapped.matrix())?,
            detailed_balance: detailed_balance_error(&spec, p_a, p_b, t_a, t_b)?,
        });
    }
    Ok(MapCheckReport {
        max_discrepancy: draws.iter().map(|d| d.discrepancy).fold(0.0, f64::max),
        max_detailed_balance: draws.iter().map(|d| d.detailed_balance).fold(0.0, f64::max),
        draws,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_default_machine_gives_product_populations() {
        let cfg = SteadyConfig { machine: MachineSpec::qutrit(3.0, 0.0, 0.0, 0.0).unwrap(), ..Default::default() };
        let out = solve_machine(&cfg).unwrap();
        // τ_A is maximally mixed, τ_B the ground state |0⟩.
        for (k, p) in out.populations.iter().enumerate() {
            let expected = if k % 3 == 0 { 1.0 / 3.0 } else { 0.0 };
            assert!((p - expected).abs() < 1e-10, "{k}: {p}");
        }
        assert!(out.max_coherence < 1e-10);
        assert!(filter_machine(&cfg).unwrap_err().kind() == "vanishing_success");
    }

    #[test]
    fn default_machine_is_entangled_after_filtering() {
        let out = filter_machine(&SteadyConfig::default()).unwrap();
        assert!(out.report.negativity > 0.3 && out.p_suc > 0.0);
    }

    #[test]
    fn mapping_check_passes() {
        let rep = map_check(&MapCheckConfig { draws: 5, ..Default::default() }, 11).unwrap();
        assert_eq!(rep.draws.len(), 5);
        assert!(rep.max_discrepancy < 1e-12 && rep.max_detailed_balance < 1e-12, "{rep:?}");
    }
}
