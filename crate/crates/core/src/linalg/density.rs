use super::{
    eig_hermitian, hermiticity_defect, is_finite, projector, trace, BipartiteShape, ComplexMatrix, ComplexVector, C64,
};
use crate::error::{Error, Result};

/// Tolerance on trace, Hermiticity and negative eigenvalues when validating.
pub const STATE_TOL: f64 = 1e-9;

/// A positive, unit-trace operator on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    shape: BipartiteShape,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix, shape: BipartiteShape) -> Result<Self> {
        shape.check(&matrix)?;
        if !is_finite(&matrix) {
            return Err(Error::InvalidParameter("density operator has non-finite entries".into()));
        }
        let deviation = hermiticity_defect(&matrix);
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = trace(&matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidParameter(format!("trace {tr} is not 1")));
        }
        let min = *eig_hermitian(&matrix)?.values.last().unwrap();
        if min < -STATE_TOL {
            return Err(Error::UnphysicalState { min_eigenvalue: min });
        }
        Ok(Self { matrix, shape })
    }

    /// Wraps a matrix without validation; for closed forms whose physicality
    /// is established separately.
    pub fn new_unchecked(matrix: ComplexMatrix, shape: BipartiteShape) -> Self {
        Self { matrix, shape }
    }

    /// Symmetrizes, normalizes the trace and clips eigenvalues in
    /// `[-tol, 0)` to zero. More negative eigenvalues are an error.
    pub fn from_raw(raw: &ComplexMatrix, shape: BipartiteShape, tol: f64) -> Result<Self> {
        shape.check(raw)?;
        let mut m = (raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let tr = trace(&m).re;
        if !(tr.is_finite() && tr.abs() > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize operator with trace {tr}")));
        }
        m /= C64::new(tr, 0.0);
        let eig = eig_hermitian(&m)?;
        let min = *eig.values.last().unwrap();
        if min < -tol {
            return Err(Error::UnphysicalState { min_eigenvalue: min });
        }
        if min < 0.0 {
            let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let rebuilt =
                super::HermitianEigen { values: clipped.iter().map(|v| v / total).collect(), vectors: eig.vectors };
            m = rebuilt.reconstruct();
            m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        }
        Ok(Self { matrix: m, shape })
    }

    pub fn pure(psi: &ComplexVector, shape: BipartiteShape) -> Result<Self> {
        if psi.len() != shape.total() {
            return Err(Error::DimensionMismatch(format!(
                "state vector of length {} for a {}-dimensional space",
                psi.len(),
                shape.total()
            )));
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Ok(Self { matrix: projector(&psi), shape })
    }

    pub fn maximally_mixed(shape: BipartiteShape) -> Self {
        let n = shape.total();
        Self { matrix: ComplexMatrix::identity(n, n) / C64::new(n as f64, 0.0), shape }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    /// Diagonal entries (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Entry ⟨a₁ b₁|ρ|a₂ b₂⟩.
    pub fn element(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        self.matrix[(self.shape.index(row.0, row.1), self.shape.index(col.0, col.1))]
    }

    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        super::trace_distance(&self.matrix, &other.matrix)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).diagonal().iter().map(|z| z.re).sum()
    }
}
