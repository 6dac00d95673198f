use nalgebra::{SymmetricEigen, SVD};

use super::{hermiticity_defect, square_dim, ComplexMatrix, ComplexVector, C64};
use crate::error::{Error, Result};

/// Relative kernel tolerance used when callers do not pick one.
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;

/// Spectrum of a Hermitian matrix, eigenvalues in descending order.
///
/// Column `k` of `vectors` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let mut col = scaled.column_mut(k);
            col *= C64::new(lambda, 0.0);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = square_dim(m, "eig_hermitian")?;
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// A unit-norm kernel vector together with the singular values that
/// certify its isolation.
#[derive(Debug, Clone)]
pub struct NullVector {
    pub vector: ComplexVector,
    /// Smallest singular value (the kernel one).
    pub smallest: f64,
    /// Second smallest singular value; the spectral gap above the kernel.
    pub second: f64,
    /// Largest singular value, the scale the tolerance is relative to.
    pub scale: f64,
}

impl NullVector {
    /// Kernel gap relative to the matrix scale.
    pub fn relative_gap(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.second / self.scale
        }
    }
}

struct BlockSvd {
    indices: Vec<usize>,
    singular: Vec<f64>,
    v_t: ComplexMatrix,
}

fn block_svd(m: &ComplexMatrix, indices: Vec<usize>) -> Result<BlockSvd> {
    let k = indices.len();
    let sub = ComplexMatrix::from_fn(k, k, |r, c| m[(indices[r], indices[c])]);
    let svd = SVD::new(sub, false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::InvalidParameter("singular value decomposition failed".into()))?;
    let singular = svd.singular_values.iter().copied().collect();
    Ok(BlockSvd { indices, singular, v_t })
}

fn kernel_from_blocks(blocks: &[BlockSvd], n: usize, tol: f64) -> Result<NullVector> {
    let scale = blocks.iter().flat_map(|b| b.singular.iter().copied()).fold(0.0, f64::max);
    let threshold = tol * scale;

    let mut kernel: Vec<(usize, usize)> = Vec::new();
    let mut smallest = f64::INFINITY;
    let mut above = f64::INFINITY;
    for (bi, b) in blocks.iter().enumerate() {
        for (si, &s) in b.singular.iter().enumerate() {
            if s <= threshold {
                kernel.push((bi, si));
            } else {
                above = above.min(s);
            }
            smallest = smallest.min(s);
        }
    }
    match kernel.len() {
        0 => Err(Error::NoKernel { smallest, threshold }),
        1 => {
            let (bi, si) = kernel[0];
            let b = &blocks[bi];
            let mut vector = ComplexVector::zeros(n);
            for (local, &global) in b.indices.iter().enumerate() {
                vector[global] = b.v_t[(si, local)].conj();
            }
            let norm = vector.norm();
            vector /= C64::new(norm, 0.0);
            let second = if above.is_finite() { above } else { 0.0 };
            Ok(NullVector { vector, smallest: b.singular[si], second, scale })
        }
        dim => Err(Error::DegenerateKernel { dim, threshold }),
    }
}

/// Kernel vector of a square matrix by singular value decomposition.
///
/// `tol` is relative to the largest singular value. Exactly one singular
/// value may fall at or below `tol * σ_max`.
pub fn null_vector(m: &ComplexMatrix, tol: f64) -> Result<NullVector> {
    let n = square_dim(m, "null_vector")?;
    let block = block_svd(m, (0..n).collect())?;
    kernel_from_blocks(&[block], n, tol)
}

/// Connected components of the undirected graph whose edges are the
/// structurally nonzero entries of `m` (either orientation).
///
/// Permuting `m` by these components makes it block diagonal.
pub fn sparsity_blocks(m: &ComplexMatrix) -> Result<Vec<Vec<usize>>> {
    let n = square_dim(m, "sparsity_blocks")?;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in 0..n {
        for r in 0..n {
            if r != c && m[(r, c)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let root = find(&mut parent, x);
        groups.entry(root).or_default().push(x);
    }
    Ok(groups.into_values().collect())
}

/// Same contract as [`null_vector`], computed block by block over the
/// structural decomposition from [`sparsity_blocks`].
///
/// The singular values of a block-diagonal matrix are the union of those of
/// its blocks, so kernel counting is identical to the dense route.
pub fn null_vector_blockwise(m: &ComplexMatrix, tol: f64) -> Result<NullVector> {
    let n = m.nrows();
    let blocks = sparsity_blocks(m)?.into_iter().map(|idx| block_svd(m, idx)).collect::<Result<Vec<_>>>()?;
    kernel_from_blocks(&blocks, n, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, kron, ComplexMatrix, ONE, ZERO};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }
    fn sigma_z() -> ComplexMatrix {
        diag(&[1.0, -1.0])
    }

    #[test]
    fn diagonal_and_pauli_spectra() {
        let e = eig_hermitian(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        let e = eig_hermitian(&sigma_x()).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-14);
    }

    /// Characteristic polynomial of 2σx⊗σx + σz⊗I, expanded by hand.
    ///
    /// In the basis {|00⟩,|11⟩} the operator is [[1,2],[2,-1]] and in
    /// {|01⟩,|10⟩} it is [[1,2],[2,-1]] as well, so both blocks have
    /// characteristic polynomial λ² − 5 and the spectrum is ±√5 twice.
    #[test]
    fn two_qubit_operator_matches_characteristic_polynomial() {
        let m = kron(&sigma_x(), &sigma_x()) * C64::new(2.0, 0.0) + kron(&sigma_z(), &ComplexMatrix::identity(2, 2));
        let e = eig_hermitian(&m).unwrap();
        let r = 5f64.sqrt();
        let expected = [r, r, -r, -r];
        for (v, x) in e.values.iter().zip(expected) {
            assert_abs_diff_eq!(*v, x, epsilon = 1e-12);
        }
        for &v in &e.values {
            assert_abs_diff_eq!(v * v - 5.0, 0.0, epsilon = 1e-11);
        }
        assert!((e.reconstruct() - &m).norm() <= 1e-9 * m.norm());
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = diag(&[1.0, 2.0]);
        m[(0, 1)] = ONE;
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn null_vector_of_diagonal() {
        let nv = null_vector(&diag(&[0.0, 1.0, 2.0]), 1e-12).unwrap();
        assert_abs_diff_eq!(nv.vector[0].norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(nv.second, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_and_empty_kernels_are_distinct_errors() {
        assert!(matches!(null_vector(&diag(&[0.0, 0.0, 1.0]), 1e-12), Err(Error::DegenerateKernel { dim: 2, .. })));
        assert!(matches!(null_vector(&diag(&[1.0, 2.0, 3.0]), 1e-12), Err(Error::NoKernel { .. })));
        assert!(matches!(
            null_vector_blockwise(&diag(&[0.0, 0.0, 1.0]), 1e-12),
            Err(Error::DegenerateKernel { dim: 2, .. })
        ));
    }

    #[test]
    fn sparsity_blocks_find_components() {
        let mut m = diag(&[1.0, 2.0, 3.0, 4.0]);
        m[(0, 2)] = ONE;
        m[(3, 1)] = ONE;
        let blocks = sparsity_blocks(&m).unwrap();
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);
    }

    fn arb_block_matrix() -> impl Strategy<Value = ComplexMatrix> {
        // A permuted block-diagonal 6x6 matrix with a planted rank deficiency.
        (prop::collection::vec(-1.0f64..1.0, 72), prop::sample::subsequence((0..6).collect::<Vec<_>>(), 3)).prop_map(
            |(v, first)| {
                let second: Vec<usize> = (0..6).filter(|x| !first.contains(x)).collect();
                let mut m = ComplexMatrix::zeros(6, 6);
                for (bi, block) in [&first, &second].iter().enumerate() {
                    for (r, &gr) in block.iter().enumerate() {
                        for (c, &gc) in block.iter().enumerate() {
                            let k = 2 * (18 * bi + 3 * r + c);
                            m[(gr, gc)] = C64::new(v[k], v[k + 1]);
                        }
                    }
                }
                // Make the first block singular: last column = sum of the others.
                for &gr in &first {
                    m[(gr, first[2])] = m[(gr, first[0])] + m[(gr, first[1])];
                }
                m
            },
        )
    }

    proptest! {
        #[test]
        fn blockwise_kernel_matches_dense(m in arb_block_matrix()) {
            let dense = null_vector(&m, 1e-9);
            let block = null_vector_blockwise(&m, 1e-9);
            match (dense, block) {
                (Ok(a), Ok(b)) => {
                    // Same kernel up to a phase.
                    let overlap = (a.vector.adjoint() * &b.vector)[0].norm();
                    prop_assert!((overlap - 1.0).abs() < 1e-8);
                    prop_assert!((&m * &b.vector).norm() <= 10.0 * 1e-9 * b.scale);
                    prop_assert!((a.scale - b.scale).abs() < 1e-12 * a.scale);
                }
                (Err(a), Err(b)) => prop_assert_eq!(a.kind(), b.kind()),
                (a, b) => prop_assert!(false, "routes disagree: {:?} vs {:?}", a.is_ok(), b.is_ok()),
            }
        }

        #[test]
        fn eigenvalue_sum_equals_trace(v in prop::collection::vec(-1.0f64..1.0, 32)) {
            let a = ComplexMatrix::from_fn(4, 4, |r, c| C64::new(v[2 * (4 * r + c)], v[2 * (4 * r + c) + 1]));
            let h = &a + a.adjoint();
            let e = eig_hermitian(&h).unwrap();
            let tr: f64 = h.diagonal().iter().map(|z| z.re).sum();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - tr).abs() <= 1e-10 * h.norm().max(1.0));
            prop_assert!((e.reconstruct() - &h).norm() <= 1e-9 * h.norm());
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
