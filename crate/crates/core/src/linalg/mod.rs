//! Dense complex linear algebra on which the rest of the crate is built.
//!
//! Matrices are `nalgebra` dense matrices of [`C64`]. Bipartite operators use
//! the basis ordering |i⟩_A ⊗ |j⟩_B with the B index running fastest, so the
//! composite index of |i, j⟩ is `i * dim_b + j`.
//!
//! Superoperators act on column-stacked vectorizations, for which
//! vec(A X B) = (Bᵀ ⊗ A) vec X.

mod density;
mod eigen;

pub use density::{DensityOperator, STATE_TOL};
pub use eigen::{
    eig_hermitian, null_vector, null_vector_blockwise, sparsity_blocks, HermitianEigen, NullVector, DEFAULT_NULL_TOL,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// The tensor split of a composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::DimensionMismatch(format!(
                "bipartite factors must have dimension >= 2, got {dim_a}x{dim_b}"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Composite index of |a, b⟩.
    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }

    pub fn check(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n} for shape {}x{}, got {}x{}",
                self.dim_a,
                self.dim_b,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(values.len(), values.len());
    for (k, &v) in values.iter().enumerate() {
        m[(k, k)] = C64::new(v, 0.0);
    }
    m
}

/// |row⟩⟨col| in dimension `n`.
pub fn outer_basis(n: usize, row: usize, col: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(row, col)] = ONE;
    m
}

/// |ψ⟩⟨ψ|.
pub fn projector(psi: &ComplexVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

fn require_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} requires a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Relative Frobenius deviation from Hermiticity, ‖m − m†‖ / ‖m‖.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / scale
}

/// Largest entrywise modulus of a − b.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on matrices of different shapes");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Partial trace over the factor `over`; the result lives on the other factor.
pub fn partial_trace(m: &ComplexMatrix, shape: BipartiteShape, over: Subsystem) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let (da, db) = (shape.dim_a, shape.dim_b);
    let out = match over {
        Subsystem::A => {
            ComplexMatrix::from_fn(db, db, |j, jp| (0..da).map(|i| m[(shape.index(i, j), shape.index(i, jp))]).sum())
        }
        Subsystem::B => {
            ComplexMatrix::from_fn(da, da, |i, ip| (0..db).map(|j| m[(shape.index(i, j), shape.index(ip, j))]).sum())
        }
    };
    Ok(out)
}

/// Partial transpose on the factor `side`.
pub fn partial_transpose(m: &ComplexMatrix, shape: BipartiteShape, side: Subsystem) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let n = shape.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..shape.dim_a {
        for j in 0..shape.dim_b {
            for ip in 0..shape.dim_a {
                for jp in 0..shape.dim_b {
                    let v = m[(shape.index(i, j), shape.index(ip, jp))];
                    let (r, c) = match side {
                        Subsystem::A => (shape.index(ip, j), shape.index(i, jp)),
                        Subsystem::B => (shape.index(i, jp), shape.index(ip, j)),
                    };
                    out[(r, c)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    // nalgebra storage is column-major, which is exactly column stacking.
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for an `n x n` matrix.
pub fn unvectorize(v: &ComplexVector, n: usize) -> Result<ComplexMatrix> {
    if v.len() != n * n {
        return Err(Error::DimensionMismatch(format!("vector of length {} cannot be reshaped to {n}x{n}", v.len())));
    }
    Ok(ComplexMatrix::from_column_slice(n, n, v.as_slice()))
}

/// Superoperator of X ↦ A X B under column stacking.
pub fn sandwich_superop(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), a)
}

/// Sum of absolute eigenvalues of a Hermitian matrix, halved.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a - b;
    let diff = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    let eig = eig_hermitian(&diff)?;
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}

pub(crate) fn square_dim(m: &ComplexMatrix, what: &str) -> Result<usize> {
    require_square(m, what)
}
