//! Liouvillian superoperators for the reset and local Lindblad master
//! equations, steady-state extraction and time propagation.
//!
//! Generators act on column-stacked density operators:
//! d(vec ρ)/dt = L · vec ρ.

mod propagate;
mod rates;
mod steady;

pub use propagate::{propagate, stable_step};
pub use rates::{LocalRates, TransitionRates};
pub use steady::{steady_state, SteadyState};

use crate::error::{Error, Result};
use crate::linalg::{
    identity, kron, sandwich_superop, unvectorize, vectorize, BipartiteShape, ComplexMatrix, C64, I, ONE,
};
use crate::model::{thermal_state, MachineSpec, Temperature};

/// Dense generator of a master equation on a bipartite space.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
    shape: BipartiteShape,
}

impl Liouvillian {
    pub fn from_matrix(matrix: ComplexMatrix, shape: BipartiteShape) -> Result<Self> {
        let n = shape.total();
        if matrix.nrows() != n * n || matrix.ncols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "generator must be {0}x{0}, got {1}x{2}",
                n * n,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, shape })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    /// Hilbert-space dimension n (the generator is n² × n²).
    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    /// L(ρ) as an operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.shape.check(rho)?;
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim())
    }

    /// Largest |Tr L(|r⟩⟨c|)| over the matrix-unit basis.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for col in 0..n * n {
            let tr: C64 = (0..n).map(|k| self.matrix[(k * n + k, col)]).sum();
            worst = worst.max(tr.norm());
        }
        worst
    }

    /// Largest ‖L(σ†) − L(σ)†‖ over the matrix-unit basis.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let unit = crate::linalg::outer_basis(n, r, c);
                let a = self.apply(&unit.adjoint()).expect("shape checked");
                let b = self.apply(&unit).expect("shape checked").adjoint();
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }

    /// Matrix 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        self.matrix.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl std::ops::Add for Liouvillian {
    type Output = Liouvillian;
    fn add(self, rhs: Liouvillian) -> Liouvillian {
        assert_eq!(self.shape, rhs.shape, "adding generators of different shapes");
        Liouvillian { matrix: self.matrix + rhs.matrix, shape: self.shape }
    }
}

/// −i[H, ·] as a superoperator.
pub fn hamiltonian_superop(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.nrows();
    let id = identity(n);
    (kron(&id, h) - kron(&h.transpose(), &id)) * (-I)
}

/// D[O]ρ = OρO† − ½{O†O, ρ} as a superoperator.
pub fn dissipator_superop(o: &ComplexMatrix) -> ComplexMatrix {
    let n = o.nrows();
    let id = identity(n);
    let odo = o.adjoint() * o;
    sandwich_superop(o, &o.adjoint()) - (kron(&id, &odo) + kron(&odo.transpose(), &id)) * C64::new(0.5, 0.0)
}

/// p(τ Tr ρ − ρ) on a single system.
pub fn single_reset_superop(tau: &ComplexMatrix, p: f64) -> ComplexMatrix {
    let n = tau.nrows();
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for k in 0..n {
        let col = k * n + k;
        for c in 0..n {
            for r in 0..n {
                s[(c * n + r, col)] += tau[(r, c)] * p;
            }
        }
    }
    s - identity(n * n) * C64::new(p, 0.0)
}

/// Local Lindblad dissipator of one system from its rate table.
pub fn single_lindblad_superop(rates: &LocalRates) -> Result<ComplexMatrix> {
    rates.validate()?;
    let n = rates.levels;
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for tr in &rates.transitions {
        for (op, rate) in tr.jump_operators(n) {
            if rate != 0.0 {
                s += dissipator_superop(&op) * C64::new(rate, 0.0);
            }
        }
    }
    Ok(s)
}

/// Generator −i[H, ·] + p(τ Tr ρ − ρ) of a single reset system.
pub fn single_reset_generator(h: &ComplexMatrix, tau: &ComplexMatrix, p: f64) -> ComplexMatrix {
    hamiltonian_superop(h) + single_reset_superop(tau, p)
}

/// Generator −i[H, ·] + Σ D-terms of a single Lindblad system.
pub fn single_lindblad_generator(h: &ComplexMatrix, rates: &LocalRates) -> Result<ComplexMatrix> {
    Ok(hamiltonian_superop(h) + single_lindblad_superop(rates)?)
}

fn check_tau(tau: &ComplexMatrix, dim: usize, label: &str) -> Result<()> {
    if tau.nrows() != dim || tau.ncols() != dim {
        return Err(Error::DimensionMismatch(format!("{label} must be {dim}x{dim}")));
    }
    let tr: C64 = tau.diagonal().iter().sum();
    if (tr - ONE).norm() > 1e-12 {
        return Err(Error::InvalidParameter(format!("{label} has trace {tr}, expected 1")));
    }
    Ok(())
}

/// Generator of
/// dρ/dt = i[ρ, H] + p_A(τ_A ⊗ Tr_A ρ − ρ) + p_B(Tr_B ρ ⊗ τ_B − ρ).
pub fn reset_liouvillian(
    h: &ComplexMatrix,
    shape: BipartiteShape,
    tau_a: &ComplexMatrix,
    tau_b: &ComplexMatrix,
    p_a: f64,
    p_b: f64,
) -> Result<Liouvillian> {
    shape.check(h)?;
    check_tau(tau_a, shape.dim_a, "tau_A")?;
    check_tau(tau_b, shape.dim_b, "tau_B")?;
    if !(p_a >= 0.0 && p_b >= 0.0 && p_a.is_finite() && p_b.is_finite()) {
        return Err(Error::InvalidParameter(format!("reset rates must be >= 0, got {p_a}, {p_b}")));
    }
    let n = shape.total();
    let (da, db) = (shape.dim_a, shape.dim_b);
    let vi = |r: usize, c: usize| c * n + r;
    let mut m = hamiltonian_superop(h);

    // τ_A ⊗ Tr_A ρ: entry ((i,j),(i',j')) collects τ_A[i,i'] ρ((k,j),(k,j')).
    for i in 0..da {
        for ip in 0..da {
            let t = tau_a[(i, ip)];
            if t == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..db {
                for jp in 0..db {
                    let row = vi(shape.index(i, j), shape.index(ip, jp));
                    for k in 0..da {
                        m[(row, vi(shape.index(k, j), shape.index(k, jp)))] += t * p_a;
                    }
                }
            }
        }
    }
    // Tr_B ρ ⊗ τ_B: entry ((i,j),(i',j')) collects ρ((i,l),(i',l)) τ_B[j,j'].
    for j in 0..db {
        for jp in 0..db {
            let t = tau_b[(j, jp)];
            if t == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..da {
                for ip in 0..da {
                    let row = vi(shape.index(i, j), shape.index(ip, jp));
                    for l in 0..db {
                        m[(row, vi(shape.index(i, l), shape.index(ip, l)))] += t * p_b;
                    }
                }
            }
        }
    }
    for k in 0..n * n {
        m[(k, k)] -= C64::new(p_a + p_b, 0.0);
    }
    Liouvillian::from_matrix(m, shape)
}

/// Generator of the local Lindblad equation: −i[H, ·] plus the jump and
/// dephasing dissipators of each subsystem embedded as O ⊗ 1 and 1 ⊗ O.
pub fn lindblad_liouvillian(
    h: &ComplexMatrix,
    shape: BipartiteShape,
    rates_a: &LocalRates,
    rates_b: &LocalRates,
) -> Result<Liouvillian> {
    shape.check(h)?;
    rates_a.validate()?;
    rates_b.validate()?;
    if rates_a.levels != shape.dim_a || rates_b.levels != shape.dim_b {
        return Err(Error::DimensionMismatch("rate tables do not match subsystem dimensions".into()));
    }
    let mut m = hamiltonian_superop(h);
    let (ia, ib) = (identity(shape.dim_a), identity(shape.dim_b));
    for tr in &rates_a.transitions {
        for (op, rate) in tr.jump_operators(shape.dim_a) {
            if rate != 0.0 {
                m += dissipator_superop(&kron(&op, &ib)) * C64::new(rate, 0.0);
            }
        }
    }
    for tr in &rates_b.transitions {
        for (op, rate) in tr.jump_operators(shape.dim_b) {
            if rate != 0.0 {
                m += dissipator_superop(&kron(&ia, &op)) * C64::new(rate, 0.0);
            }
        }
    }
    Liouvillian::from_matrix(m, shape)
}

/// Reset-model generator of a machine with thermal baths at `t_a`, `t_b`.
pub fn reset_machine(
    spec: &MachineSpec,
    t_a: Temperature,
    t_b: Temperature,
    p_a: f64,
    p_b: f64,
) -> Result<Liouvillian> {
    let tau_a = thermal_state(&spec.ladder_a()?, t_a);
    let tau_b = thermal_state(&spec.ladder_b()?, t_b);
    reset_liouvillian(&spec.hamiltonian()?, spec.shape(), &tau_a, &tau_b, p_a, p_b)
}

/// Lindblad-model generator of a machine.
pub fn lindblad_machine(spec: &MachineSpec, rates_a: &LocalRates, rates_b: &LocalRates) -> Result<Liouvillian> {
    lindblad_liouvillian(&spec.hamiltonian()?, spec.shape(), rates_a, rates_b)
}
