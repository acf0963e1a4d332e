//! Dense symmetric-definite reduction, used as an oracle and for tiny problems.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::fem::SparseSymMatrix;

use super::{fix_sign, EigenError, EigenPair};

pub const DENSE_MAX_DIM: usize = 2000;

/// All eigenpairs, ascending, via `L^{-1} K L^{-T}` with `M = L L^T`.
pub fn dense_solve(k: &SparseSymMatrix, m: &SparseSymMatrix) -> Result<Vec<EigenPair>, EigenError> {
    let n = k.dim();
    if m.dim() != n {
        return Err(EigenError::DimensionMismatch(n, m.dim()));
    }
    if n > DENSE_MAX_DIM {
        return Err(EigenError::DimensionTooLarge(n));
    }
    let chol = Cholesky::new(m.to_dense()).ok_or(EigenError::NotPositiveDefinite)?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&nalgebra::DMatrix::identity(n, n))
        .ok_or(EigenError::NotPositiveDefinite)?;
    let mut c = &linv * k.to_dense() * linv.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let vectors = linv.transpose() * eig.eigenvectors;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(idx
        .into_iter()
        .map(|i| {
            let mut v: Vec<f64> = vectors.column(i).iter().cloned().collect();
            fix_sign(&mut v);
            EigenPair {
                lambda: eig.eigenvalues[i].max(0.0),
                vector: v,
            }
        })
        .collect())
}
