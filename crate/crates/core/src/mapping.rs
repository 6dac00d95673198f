//! Exact translation of the qutrit reset dissipator into local Lindblad
//! rates, plus bosonic rate parameterizations.

use serde::{Deserialize, Serialize};

use crate::dynamics::{LocalRates, TransitionRates};
use crate::error::{Error, Result};
use crate::linalg::{outer_basis, ComplexMatrix, C64, I};
use crate::model::{thermal_populations, EnergyLadder, Temperature};

/// Largest thermal population for which every mapped dephasing rate is ≥ 0.
pub const MAX_POPULATION: f64 = 2.0 / 3.0;

/// Bose-Einstein occupation, with the infinite-temperature case kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Occupation {
    Finite(f64),
    Infinite,
}

impl Occupation {
    pub fn finite(self) -> Option<f64> {
        match self {
            Occupation::Finite(v) => Some(v),
            Occupation::Infinite => None,
        }
    }
}

/// n_B(ΔE, T) = 1/(e^{ΔE/T} − 1).
pub fn bose_einstein(delta_e: f64, t: Temperature) -> Result<Occupation> {
    if !(delta_e > 0.0 && delta_e.is_finite()) {
        return Err(Error::InvalidParameter(format!("energy gap must be positive, got {delta_e}")));
    }
    Ok(match t {
        Temperature::Infinite => Occupation::Infinite,
        Temperature::Finite(0.0) => Occupation::Finite(0.0),
        Temperature::Finite(t) => Occupation::Finite(1.0 / (delta_e / t).exp_m1()),
    })
}

/// Γ⁺ = Γ n_B and Γ⁻ = Γ (1 + n_B) for a finite temperature.
pub fn bosonic_rates(coupling: f64, delta_e: f64, t: Temperature) -> Result<(f64, f64)> {
    if !(coupling >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be >= 0, got {coupling}")));
    }
    match bose_einstein(delta_e, t)? {
        Occupation::Finite(n) => Ok((coupling * n, coupling * (1.0 + n))),
        Occupation::Infinite => Err(Error::InvalidParameter("bosonic rates diverge at infinite temperature".into())),
    }
}

/// Rate table with bosonic jump rates on every level pair, coupling
/// `coupling(m, n)` for the pair and a uniform dephasing rate.
pub fn bosonic_local_rates(
    ladder: &EnergyLadder,
    t: Temperature,
    coupling: impl Fn(usize, usize) -> f64,
    dephasing: f64,
) -> Result<LocalRates> {
    let mut rates = LocalRates::zero(ladder.levels());
    for tr in rates.transitions.iter_mut() {
        let (up, down) = bosonic_rates(coupling(tr.lower, tr.upper), ladder.gap(tr.lower, tr.upper), t)?;
        tr.up = up;
        tr.down = down;
        tr.dephasing = dephasing;
    }
    rates.validate()?;
    Ok(rates)
}

fn check_distribution(tau: &[f64]) -> Result<()> {
    if tau.len() != 3 {
        return Err(Error::InvalidParameter(format!("mapping needs three populations, got {}", tau.len())));
    }
    if tau.iter().any(|&v| !(v >= 0.0)) || (tau.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("{tau:?} is not a probability distribution")));
    }
    Ok(())
}

/// The three transition entries solving the generator-matching equations,
/// without the sign restriction on dephasing.
pub fn equivalent_transitions(p: f64, tau: &[f64]) -> Result<[TransitionRates; 3]> {
    check_distribution(tau)?;
    let t = |lower, upper, up, down, dephasing| TransitionRates { lower, upper, up, down, dephasing };
    Ok([
        t(0, 1, p * tau[1], p * tau[0], p * (2.0 - 3.0 * tau[2]) / 9.0),
        t(0, 2, p * tau[2], p * tau[0], p * (2.0 - 3.0 * tau[1]) / 9.0),
        t(1, 2, p * tau[2], p * tau[1], p * (2.0 - 3.0 * tau[0]) / 9.0),
    ])
}

/// Lindblad rates whose dissipator equals p(τ Tr ρ − ρ) on a qutrit.
/// Requires every τ_k ≤ 2/3 so that all dephasing rates are non-negative.
pub fn reset_to_lindblad(p: f64, tau: &[f64]) -> Result<LocalRates> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("reset rate must be >= 0, got {p}")));
    }
    let transitions = equivalent_transitions(p, tau)?;
    if let Some(k) = tau.iter().position(|&v| v > MAX_POPULATION + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "population tau_{k} = {} exceeds 2/3; the mapped dephasing rate would be negative",
            tau[k]
        )));
    }
    let rates = LocalRates { levels: 3, transitions: transitions.to_vec() };
    rates.validate()?;
    Ok(rates)
}

/// Mapped rates for a thermal reset bath at temperature `t`.
pub fn thermal_reset_to_lindblad(p: f64, ladder: &EnergyLadder, t: Temperature) -> Result<LocalRates> {
    reset_to_lindblad(p, &thermal_populations(ladder, t))
}

/// Γ_mn = p τ_n / n_B(ΔE, T), the bosonic coupling that reproduces the
/// mapped jump rates Γ⁺ = p τ_n and Γ⁻ = p τ_m.
pub fn coupling_from_reset(p: f64, tau_n: f64, delta_e: f64, t: Temperature) -> Result<f64> {
    match (t, bose_einstein(delta_e, t)?) {
        (Temperature::Finite(v), Occupation::Finite(n)) if v > 0.0 => Ok(p * tau_n / n),
        _ => Err(Error::InvalidParameter(
            "coupling is singular at zero or infinite temperature; use the direct rate form".into(),
        )),
    }
}

/// Hermitian operator basis of size n²: |m⟩⟨m|, |m⟩⟨n| + |n⟩⟨m| and
/// i(|m⟩⟨n| − |n⟩⟨m|) for m < n.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for m in 0..n {
        basis.push(outer_basis(n, m, m));
    }
    for m in 0..n {
        for k in m + 1..n {
            basis.push(outer_basis(n, m, k) + outer_basis(n, k, m));
            basis.push((outer_basis(n, m, k) - outer_basis(n, k, m)) * I);
        }
    }
    basis
}

/// Largest entrywise difference of two superoperators over the Hermitian basis.
pub fn generator_discrepancy(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("generators differ in shape".into()));
    }
    let n = (a.nrows() as f64).sqrt().round() as usize;
    if n * n != a.nrows() {
        return Err(Error::DimensionMismatch(format!("{} is not a square dimension", a.nrows())));
    }
    let diff = a - b;
    let mut worst = 0.0f64;
    for sigma in hermitian_basis(n) {
        let v = crate::linalg::vectorize(&sigma);
        let out = &diff * v;
        worst = out.iter().map(|z: &C64| z.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{single_lindblad_generator, single_reset_generator};
    use crate::model::thermal_state;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ladder(eps: f64) -> EnergyLadder {
        EnergyLadder::from_gaps(&[1.0, eps]).unwrap()
    }

    #[test]
    fn occupation_values() {
        assert_eq!(bose_einstein(1.0, Temperature::ZERO).unwrap(), Occupation::Finite(0.0));
        assert_eq!(bose_einstein(1.0, Temperature::Infinite).unwrap(), Occupation::Infinite);
        let n = bose_einstein(1.0, Temperature::new(1.0).unwrap()).unwrap().finite().unwrap();
        assert_relative_eq!(n, 1.0 / (std::f64::consts::E - 1.0), max_relative = 1e-15);
        assert_relative_eq!(n, 0.58198, epsilon = 1e-5);
        assert!(bose_einstein(0.0, Temperature::new(1.0).unwrap()).is_err());
        assert!(bose_einstein(-1.0, Temperature::new(1.0).unwrap()).is_err());
        let n_small = bose_einstein(1.0, Temperature::new(1e-3).unwrap()).unwrap().finite().unwrap();
        assert_eq!(n_small, 0.0);
    }

    #[test]
    fn infinite_temperature_rates() {
        let p = 0.03;
        let r = reset_to_lindblad(p, &[1.0 / 3.0; 3]).unwrap();
        for t in &r.transitions {
            assert_relative_eq!(t.up, p / 3.0, max_relative = 1e-15);
            assert_relative_eq!(t.down, p / 3.0, max_relative = 1e-15);
            assert_relative_eq!(t.dephasing, p / 9.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn zero_temperature_corner() {
        let p = 0.09;
        let [t01, t02, t12] = equivalent_transitions(p, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((t01.down, t02.down, t12.down), (p, p, 0.0));
        assert_eq!((t01.up, t02.up, t12.up), (0.0, 0.0, 0.0));
        assert_relative_eq!(t01.dephasing, 2.0 * p / 9.0);
        assert_relative_eq!(t02.dephasing, 2.0 * p / 9.0);
        assert_relative_eq!(t12.dephasing, -p / 9.0);
        assert!(reset_to_lindblad(p, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_rate_maps_to_zero_rates() {
        let r = reset_to_lindblad(0.0, &[0.5, 0.3, 0.2]).unwrap();
        assert!(r.transitions.iter().all(|t| t.up == 0.0 && t.down == 0.0 && t.dephasing == 0.0));
    }

    #[test]
    fn bad_distributions_rejected() {
        assert!(reset_to_lindblad(0.1, &[0.5, 0.6, -0.1]).is_err());
        assert!(reset_to_lindblad(0.1, &[0.5, 0.6, 0.1]).is_err());
        assert!(reset_to_lindblad(0.1, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn single_qutrit_generators_agree_at_unit_temperature() {
        let l = ladder(1.0);
        let t = Temperature::new(1.0).unwrap();
        let p = 0.01;
        let h = l.hamiltonian();
        let reset = single_reset_generator(&h, &thermal_state(&l, t), p);
        let lind = single_lindblad_generator(&h, &thermal_reset_to_lindblad(p, &l, t).unwrap()).unwrap();
        assert!(generator_discrepancy(&reset, &lind).unwrap() < 1e-12);
    }

    #[test]
    fn coupling_round_trip_at_unit_temperature() {
        let l = EnergyLadder::new(vec![0.0, 1.0, 2.0]).unwrap();
        let t = Temperature::new(1.0).unwrap();
        let p = 0.01;
        let tau = thermal_populations(&l, t);
        for (m, n) in [(0, 1), (0, 2), (1, 2)] {
            let de = l.gap(m, n);
            let g = coupling_from_reset(p, tau[n], de, t).unwrap();
            let (up, down) = bosonic_rates(g, de, t).unwrap();
            assert_relative_eq!(up, p * tau[n], max_relative = 1e-14);
            assert_relative_eq!(down, p * tau[m], max_relative = 1e-12);
        }
        assert!(coupling_from_reset(p, 0.1, 1.0, Temperature::ZERO).is_err());
        assert!(coupling_from_reset(p, 0.1, 1.0, Temperature::Infinite).is_err());
    }

    #[test]
    fn limiting_bath_settings() {
        let l = ladder(3.0);
        let hot = thermal_reset_to_lindblad(0.02, &l, Temperature::Infinite).unwrap();
        for t in &hot.transitions {
            assert_relative_eq!(t.up, t.down, max_relative = 1e-15);
        }
        let cold = equivalent_transitions(0.02, &thermal_populations(&l, Temperature::new(1e-3).unwrap())).unwrap();
        assert_relative_eq!(cold[0].down, cold[1].down, max_relative = 1e-15);
        assert_eq!(cold[2].down, 0.0);
        assert!(cold.iter().all(|t| t.up == 0.0));
    }

    #[test]
    fn hermitian_basis_is_complete() {
        let basis = hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        let stacked = ComplexMatrix::from_columns(&basis.iter().map(crate::linalg::vectorize).collect::<Vec<_>>());
        let rank = stacked.svd(false, false).singular_values.iter().filter(|s| **s > 1e-12).count();
        assert_eq!(rank, 9);
    }

    proptest! {
        #[test]
        fn detailed_balance(eps in 1.0f64..5.0, t in 0.05f64..20.0, g in 1e-4f64..1e-1) {
            let l = ladder(eps);
            let temp = Temperature::new(t).unwrap();
            let r = bosonic_local_rates(&l, temp, |_, _| g, 0.0).unwrap();
            for tr in &r.transitions {
                let de = l.gap(tr.lower, tr.upper);
                prop_assert!((tr.up / tr.down - (-de / t).exp()).abs() <= 1e-12);
            }
        }

        #[test]
        fn mapped_rates_satisfy_detailed_balance(eps in 1.0f64..5.0, t in 0.9f64..50.0, p in 1e-4f64..1e-1) {
            let l = ladder(eps);
            let temp = Temperature::new(t).unwrap();
            if thermal_populations(&l, temp)[0] <= MAX_POPULATION {
                let r = thermal_reset_to_lindblad(p, &l, temp).unwrap();
                for tr in &r.transitions {
                    let de = l.gap(tr.lower, tr.upper);
                    prop_assert!((tr.up / tr.down - (-de / t).exp()).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn single_qutrit_generator_equality(
            eps in 1.0f64..5.0,
            p in 1e-4f64..1e-1,
            w in proptest::array::uniform3(0.05f64..1.0),
        ) {
            let total: f64 = w.iter().sum();
            let tau: Vec<f64> = w.iter().map(|v| v / total).collect();
            prop_assume!(tau.iter().all(|&v| v <= MAX_POPULATION));
            let l = ladder(eps);
            let h = l.hamiltonian();
            let reset = single_reset_generator(&h, &crate::linalg::diag(&tau), p);
            let lind = single_lindblad_generator(&h, &reset_to_lindblad(p, &tau).unwrap()).unwrap();
            prop_assert!(generator_discrepancy(&reset, &lind).unwrap() < 1e-12);
        }
    }
}
