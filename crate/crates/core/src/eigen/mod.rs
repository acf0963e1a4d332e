//! Lowest eigenpairs of the pencil `K u = lambda M u`.

mod dense;
pub mod factor;
mod krylov;

use thiserror::Error;

use crate::fem::SparseSymMatrix;

pub use dense::{dense_solve, DENSE_MAX_DIM};
pub use krylov::{solve_lowest, solve_lowest_with, SolverOptions};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("no convergence after {iterations} operator applications (worst residual {worst_residual:e})")]
    NoConvergence { iterations: usize, worst_residual: f64 },
    #[error("dimension {0} exceeds the dense solver limit")]
    DimensionTooLarge(usize),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("requested {requested} eigenpairs from a problem of dimension {dim}")]
    InvalidCount { requested: usize, dim: usize },
    #[error("tolerance {0} is below 1e-12")]
    InvalidTolerance(f64),
    #[error("matrix dimensions differ: {0} and {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// M-normalized coefficients over the mesh DOFs.
    pub vector: Vec<f64>,
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||K v - lambda M v|| / ((1 + lambda) ||M v||)`.
pub fn residual(k: &SparseSymMatrix, m: &SparseSymMatrix, pair: &EigenPair) -> f64 {
    let kv = k.mul_vec(&pair.vector);
    let mv = m.mul_vec(&pair.vector);
    let r: Vec<f64> = kv.iter().zip(&mv).map(|(a, b)| a - pair.lambda * b).collect();
    norm2(&r) / ((1.0 + pair.lambda.abs()) * norm2(&mv))
}

/// Flips the sign so the entry of largest magnitude is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        // small slack so near-ties resolve to the first index on every run
        if x.abs() > best * (1.0 + 1e-12) {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
