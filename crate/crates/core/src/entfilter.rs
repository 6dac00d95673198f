//! Local filtering and entanglement diagnostics.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, kron, partial_transpose, BipartiteShape, ComplexMatrix, ComplexVector, DensityOperator, Subsystem,
    C64, STATE_TOL,
};

/// Success probabilities at or below this are reported as failures.
pub const MIN_SUCCESS: f64 = 1e-14;
/// Partial-transpose eigenvalues above −ZERO_EIGENVALUE count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// Levels kept by the local projectors Π_A and Π_B.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    kept_a: Vec<usize>,
    kept_b: Vec<usize>,
}

impl FilterSpec {
    /// Level lists must be strictly increasing with at least two entries each.
    pub fn new(kept_a: Vec<usize>, kept_b: Vec<usize>) -> Result<Self> {
        for (name, kept) in [("A", &kept_a), ("B", &kept_b)] {
            if kept.len() < 2 {
                return Err(Error::InvalidParameter(format!("filter on {name} must keep at least two levels")));
            }
            if kept.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!("filter levels on {name} must be strictly increasing")));
            }
        }
        Ok(Self { kept_a, kept_b })
    }

    /// Π_A = |0⟩⟨0| + |1⟩⟨1|, Π_B = |1⟩⟨1| + |2⟩⟨2|.
    pub fn qutrit() -> Self {
        Self { kept_a: vec![0, 1], kept_b: vec![1, 2] }
    }

    /// Π_A = 1 − |d⟩⟨d|, Π_B = 1 − |0⟩⟨0| on d+1 levels.
    pub fn qudit(d: usize) -> Result<Self> {
        Self::new((0..d).collect(), (1..=d).collect())
    }

    pub fn kept_a(&self) -> &[usize] {
        &self.kept_a
    }

    pub fn kept_b(&self) -> &[usize] {
        &self.kept_b
    }

    pub fn output_shape(&self) -> BipartiteShape {
        BipartiteShape { dim_a: self.kept_a.len(), dim_b: self.kept_b.len() }
    }

    fn check(&self, shape: BipartiteShape) -> Result<()> {
        let too_big = |kept: &[usize], dim: usize| kept.last().is_some_and(|&l| l >= dim);
        if too_big(&self.kept_a, shape.dim_a) || too_big(&self.kept_b, shape.dim_b) {
            return Err(Error::DimensionMismatch(format!(
                "filter levels exceed subsystem dimensions {}x{}",
                shape.dim_a, shape.dim_b
            )));
        }
        if self.kept_a.len() == shape.dim_a && self.kept_b.len() == shape.dim_b {
            return Err(Error::InvalidParameter("filter keeps every level".into()));
        }
        Ok(())
    }

    /// Full-space indices of the kept basis, A-major.
    pub fn indices(&self, shape: BipartiteShape) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.kept_a.len() * self.kept_b.len());
        for &a in &self.kept_a {
            for &b in &self.kept_b {
                idx.push(shape.index(a, b));
            }
        }
        idx
    }
}

/// Applies Π_A ⊗ Π_B, renormalizes, and returns the state in the kept basis
/// together with the success probability.
pub fn apply_filter(rho: &DensityOperator, f: &FilterSpec) -> Result<(DensityOperator, f64)> {
    let shape = rho.shape();
    f.check(shape)?;
    let idx = f.indices(shape);
    let m = rho.matrix();
    let sub = ComplexMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
    let p_suc: f64 = sub.diagonal().iter().map(|z| z.re).sum();
    if !(p_suc > MIN_SUCCESS) {
        return Err(Error::VanishingSuccess { p_suc });
    }
    let out = DensityOperator::from_raw(&sub, f.output_shape(), STATE_TOL)?;
    Ok((out, p_suc.min(1.0)))
}

fn negative_sum(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().filter(|&&v| v < -ZERO_EIGENVALUE).map(|v| -v).sum())
}

/// Sum of |negative eigenvalues| of the partial transpose on B.
pub fn negativity(rho: &DensityOperator) -> Result<f64> {
    negative_sum(&partial_transpose(rho.matrix(), rho.shape(), Subsystem::B)?)
}

/// −λ_min of the partial transpose: the negativity of a two-qubit state when
/// positive, and a smooth distance-to-entanglement score otherwise.
pub fn signed_negativity(rho: &DensityOperator) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), rho.shape(), Subsystem::B)?;
    Ok(-eig_hermitian(&pt)?.values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Same quantity computed from the partial transpose on A.
pub fn negativity_a_side(rho: &DensityOperator) -> Result<f64> {
    negative_sum(&partial_transpose(rho.matrix(), rho.shape(), Subsystem::A)?)
}

/// The Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Correlation matrix T_ij = Tr[ρ σ_i ⊗ σ_j] of a two-qubit state.
pub fn correlation_matrix(rho: &DensityOperator) -> Result<Matrix3<f64>> {
    let shape = rho.shape();
    if shape.dim_a != 2 || shape.dim_b != 2 {
        return Err(Error::DimensionMismatch(format!(
            "correlation matrix needs two qubits, got {}x{}",
            shape.dim_a, shape.dim_b
        )));
    }
    let s = pauli();
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let op = kron(&s[i], &s[j]);
            t[(i, j)] = (rho.matrix() * op).trace().re;
        }
    }
    Ok(t)
}

/// Maximal CHSH value 2√(u₁ + u₂) with u₁ ≥ u₂ the largest eigenvalues of TᵀT.
pub fn chsh_max(rho: &DensityOperator) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let mut u: Vec<f64> = SymmetricEigen::new(t.transpose() * t).eigenvalues.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (u[0] + u[1]).max(0.0).sqrt())
}

/// ⟨ψ|ρ|ψ⟩ for the normalized target ψ.
pub fn fidelity_target(rho: &DensityOperator, psi: &ComplexVector) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target of length {} for a {}-dimensional state",
            psi.len(),
            rho.dim()
        )));
    }
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("zero target vector".into()));
    }
    let psi = psi / C64::new(norm, 0.0);
    Ok((psi.adjoint() * rho.matrix() * &psi)[(0, 0)].re.clamp(0.0, 1.0))
}

/// Entanglement figures of a filtered state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub negativity: f64,
    /// Two-qubit states only.
    pub chsh: Option<f64>,
    pub fidelity_target: Option<f64>,
    /// 2 × negativity, for two qubits.
    pub concurrence_lower_bound: Option<f64>,
}

pub fn report(rho: &DensityOperator, target: Option<&ComplexVector>) -> Result<EntanglementReport> {
    let n = negativity(rho)?;
    let qubits = rho.shape().dim_a == 2 && rho.shape().dim_b == 2;
    Ok(EntanglementReport {
        negativity: n,
        chsh: if qubits { Some(chsh_max(rho)?) } else { None },
        fidelity_target: target.map(|t| fidelity_target(rho, t)).transpose()?,
        concurrence_lower_bound: qubits.then_some(2.0 * n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{filtered_qutrit_state, psi_plus, QutritCouplings};
    use crate::linalg::{diag, projector, ComplexVector};
    use crate::model::{thermal_state, EnergyLadder, Temperature};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q() -> BipartiteShape {
        BipartiteShape::new(2, 2).unwrap()
    }

    fn bell() -> DensityOperator {
        DensityOperator::pure(&psi_plus(), q()).unwrap()
    }

    fn eq7(pa: f64, pb: f64) -> DensityOperator {
        filtered_qutrit_state(0.01, QutritCouplings::Equal, pa, pb).unwrap().density().unwrap()
    }

    fn unitary_from(params: &[f64]) -> ComplexMatrix {
        // Z-Y-Z Euler rotation.
        let (a, b, c) = (params[0], params[1], params[2]);
        let rz = |t: f64| diag_c(&[C64::from_polar(1.0, -t / 2.0), C64::from_polar(1.0, t / 2.0)]);
        let ry = |t: f64| {
            let (s, co) = ((t / 2.0).sin(), (t / 2.0).cos());
            ComplexMatrix::from_row_slice(
                2,
                2,
                &[C64::new(co, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(co, 0.0)],
            )
        };
        rz(a) * ry(b) * rz(c)
    }

    fn diag_c(v: &[C64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_row_slice(v))
    }

    #[test]
    fn bell_state_values() {
        let b = bell();
        assert_relative_eq!(negativity(&b).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(chsh_max(&b).unwrap(), 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(fidelity_target(&b, &psi_plus()).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(signed_negativity(&b).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn mixed_and_product_states() {
        let mm = DensityOperator::maximally_mixed(q());
        assert_eq!(negativity(&mm).unwrap(), 0.0);
        assert!(chsh_max(&mm).unwrap() < 1e-14);
        assert_relative_eq!(fidelity_target(&mm, &psi_plus()).unwrap(), 0.25, epsilon = 1e-14);
        assert_relative_eq!(signed_negativity(&mm).unwrap(), -0.25, epsilon = 1e-14);
        let prod = DensityOperator::new(kron(&diag(&[0.3, 0.7]), &diag(&[0.9, 0.1])), q()).unwrap();
        assert_eq!(negativity(&prod).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_state_values() {
        let rho = eq7(0.005, 0.005);
        assert_relative_eq!(negativity(&rho).unwrap(), 0.2, epsilon = 1e-14);
        assert_relative_eq!(chsh_max(&rho).unwrap(), 2.0 * 0.72f64.sqrt(), epsilon = 1e-12);
        let t = correlation_matrix(&rho).unwrap();
        assert_relative_eq!(t[(0, 0)], 0.6, epsilon = 1e-14);
        assert_relative_eq!(t[(1, 1)], 0.6, epsilon = 1e-14);
        assert_relative_eq!(t[(2, 2)], -0.6, epsilon = 1e-14);
        let near_pure = eq7(1e-5, 1e-2);
        assert!(fidelity_target(&near_pure, &psi_plus()).unwrap() >= 0.999);
    }

    #[test]
    fn tabulated_state_negativity_and_bell_threshold() {
        for mu in [0.01, 0.3, 0.62, 1.0, 2.9, 3.1] {
            let rho = eq7(mu * 1e-2, 1e-2);
            let n = negativity(&rho).unwrap();
            assert_relative_eq!(n, ((3.0 - mu) / (4.0 * mu + 6.0)).max(0.0), epsilon = 1e-13);
            let chsh = chsh_max(&rho).unwrap();
            assert_relative_eq!(chsh, 12.0 * 2f64.sqrt() / (4.0 * mu + 6.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn filter_reindexes_pure_kept_state() {
        let shape = BipartiteShape::new(3, 3).unwrap();
        let mut psi = ComplexVector::zeros(9);
        psi[shape.index(0, 2)] = C64::new(0.6, 0.0);
        psi[shape.index(1, 1)] = C64::new(0.0, 0.8);
        let rho = DensityOperator::pure(&psi, shape).unwrap();
        let (out, p) = apply_filter(&rho, &FilterSpec::qutrit()).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);
        let mut expected = ComplexVector::zeros(4);
        expected[1] = C64::new(0.6, 0.0);
        expected[2] = C64::new(0.0, 0.8);
        assert!((out.matrix() - projector(&expected)).norm() < 1e-14);
    }

    #[test]
    fn cold_ground_state_fails_filter() {
        let la = EnergyLadder::from_gaps(&[1.0, 2.0]).unwrap();
        let lb = EnergyLadder::from_gaps_reversed(&[1.0, 2.0]).unwrap();
        let tau = kron(&thermal_state(&la, Temperature::Infinite), &thermal_state(&lb, Temperature::ZERO));
        let rho = DensityOperator::new(tau, BipartiteShape::new(3, 3).unwrap()).unwrap();
        assert!(matches!(apply_filter(&rho, &FilterSpec::qutrit()), Err(Error::VanishingSuccess { .. })));
    }

    #[test]
    fn filter_specs_validated() {
        assert!(FilterSpec::new(vec![0], vec![1, 2]).is_err());
        assert!(FilterSpec::new(vec![1, 0], vec![1, 2]).is_err());
        let full = FilterSpec::new(vec![0, 1], vec![0, 1]).unwrap();
        assert!(apply_filter(&bell(), &full).is_err());
        let big = FilterSpec::new(vec![0, 5], vec![0, 1]).unwrap();
        assert!(apply_filter(&bell(), &big).is_err());
        assert_eq!(FilterSpec::qudit(2).unwrap(), FilterSpec::qutrit());
    }

    #[test]
    fn chsh_rejects_qutrits() {
        let rho = DensityOperator::maximally_mixed(BipartiteShape::new(3, 3).unwrap());
        assert!(chsh_max(&rho).is_err());
        let r = report(&rho, None).unwrap();
        assert!(r.chsh.is_none() && r.concurrence_lower_bound.is_none());
    }

    #[test]
    fn refiltering_is_identity() {
        let shape = BipartiteShape::new(3, 3).unwrap();
        let mut psi = ComplexVector::zeros(9);
        for (k, v) in [0.1, 0.5, 0.3, 0.2, 0.6, 0.1, 0.3, 0.2, 0.3].into_iter().enumerate() {
            psi[k] = C64::new(v, 0.1 * k as f64);
        }
        let rho = DensityOperator::pure(&psi, shape).unwrap();
        let mixed = DensityOperator::from_raw(
            &(rho.matrix() * C64::new(0.7, 0.0)
                + DensityOperator::maximally_mixed(shape).matrix() * C64::new(0.3, 0.0)),
            shape,
            1e-9,
        )
        .unwrap();
        let f = FilterSpec::qutrit();
        let (once, _) = apply_filter(&mixed, &f).unwrap();
        // Embed the filtered state back and filter again.
        let mut embedded = ComplexMatrix::zeros(9, 9);
        let idx = f.indices(shape);
        for r in 0..4 {
            for c in 0..4 {
                embedded[(idx[r], idx[c])] = once.matrix()[(r, c)];
            }
        }
        let (twice, p) = apply_filter(&DensityOperator::new(embedded, shape).unwrap(), &f).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);
        assert!((twice.matrix() - once.matrix()).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn negativity_invariant_under_local_unitaries(
            mu in 0.0f64..4.0,
            ua in proptest::array::uniform3(-3.2f64..3.2),
            ub in proptest::array::uniform3(-3.2f64..3.2),
        ) {
            let rho = eq7(mu * 1e-3 + 1e-9, 1e-3);
            let u = kron(&unitary_from(&ua), &unitary_from(&ub)) * C64::from_polar(1.0, 0.3);
            let rotated = DensityOperator::new(&u * rho.matrix() * u.adjoint(), q()).unwrap();
            let (n0, n1) = (negativity(&rho).unwrap(), negativity(&rotated).unwrap());
            prop_assert!((n0 - n1).abs() < 1e-12);
            prop_assert!((chsh_max(&rho).unwrap() - chsh_max(&rotated).unwrap()).abs() < 1e-11);
            prop_assert!((negativity_a_side(&rotated).unwrap() - n1).abs() < 1e-12);
        }

        #[test]
        fn product_states_have_zero_negativity(
            a in proptest::array::uniform4(-1.0f64..1.0),
            b in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            let pure = |v: [f64; 4]| {
                let psi = ComplexVector::from_vec(vec![C64::new(v[0], v[1]), C64::new(v[2], v[3])]);
                prop_assume!(psi.norm() > 1e-3);
                Ok(projector(&(&psi / C64::new(psi.norm(), 0.0))))
            };
            let rho = DensityOperator::new(kron(&pure(a)?, &pure(b)?), q()).unwrap();
            prop_assert_eq!(negativity(&rho).unwrap(), 0.0);
            prop_assert!(chsh_max(&rho).unwrap() <= 2.0 + 1e-12);
        }

        #[test]
        fn bell_violation_implies_entanglement(p in 0.0f64..1.0, phase in -3.2f64..3.2) {
            // Werner-like family with a rotated Bell component.
            let mut psi = psi_plus();
            psi[2] *= C64::from_polar(1.0, phase);
            let m = projector(&psi) * C64::new(p, 0.0)
                + DensityOperator::maximally_mixed(q()).matrix() * C64::new(1.0 - p, 0.0);
            let rho = DensityOperator::new(m, q()).unwrap();
            let chsh = chsh_max(&rho).unwrap();
            prop_assert!(chsh <= 2.0 * 2f64.sqrt() + 1e-12);
            if chsh > 2.0 {
                prop_assert!(negativity(&rho).unwrap() > 0.0);
            }
        }
    }
}
