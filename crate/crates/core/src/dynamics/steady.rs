use super::Liouvillian;
use crate::error::{Error, Result};
use crate::linalg::{
    hermiticity_defect, null_vector_blockwise, trace, unvectorize, vectorize, DensityOperator, DEFAULT_NULL_TOL,
    STATE_TOL,
};

/// Stationary state together with solver diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub state: DensityOperator,
    /// ‖L · vec ρ̄‖ after symmetrization and clipping.
    pub residual: f64,
    /// Second-smallest over largest singular value.
    pub kernel_gap: f64,
    /// Smallest singular value over the largest.
    pub smallest_singular: f64,
    /// Relative anti-Hermitian part of the trace-normalized kernel vector.
    pub antihermitian_residue: f64,
}

/// Kernel of L via per-block SVD, normalized to unit trace.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let kernel = null_vector_blockwise(l.matrix(), DEFAULT_NULL_TOL)?;
    let n = l.dim();
    let raw = unvectorize(&kernel.vector, n)?;
    let tr = trace(&raw);
    if tr.norm() < 1e-12 {
        return Err(Error::UnphysicalState { min_eigenvalue: f64::NAN });
    }
    let raw = raw / tr;
    let antihermitian_residue = hermiticity_defect(&raw);
    let state = DensityOperator::from_raw(&raw, l.shape(), STATE_TOL)?;
    let residual = (l.matrix() * vectorize(state.matrix())).norm();
    Ok(SteadyState {
        state,
        residual,
        kernel_gap: kernel.relative_gap(),
        smallest_singular: kernel.smallest / kernel.scale,
        antihermitian_residue,
    })
}
