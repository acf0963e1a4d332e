//! Restarted block shift-invert Krylov solver with full M-orthogonalization.

use nalgebra::{DMatrix, DMatrixView, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fem::SparseSymMatrix;

use super::factor::EnvelopeCholesky;
use super::{fix_sign, norm2, EigenError, EigenPair, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub seed: u64,
    /// Budget of operator applications; defaults to `500 * m`.
    pub max_applications: Option<usize>,
    /// Krylov block width; defaults to a value between 8 and 24.
    pub block_size: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            seed: 0,
            max_applications: None,
            block_size: None,
        }
    }
}

/// The `m` smallest eigenpairs of `K u = lambda M u`, ascending.
pub fn solve_lowest(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<EigenPair>, EigenError> {
    let opts = SolverOptions {
        tol,
        seed,
        ..SolverOptions::default()
    };
    solve_lowest_with(k, m, count, &opts)
}

/// M-orthonormal basis stored column-major, together with `M` times it.
struct Basis<'a> {
    m: &'a SparseSymMatrix,
    n: usize,
    len: usize,
    v: Vec<f64>,
    mv: Vec<f64>,
}

impl<'a> Basis<'a> {
    fn new(m: &'a SparseSymMatrix, capacity: usize) -> Self {
        let n = m.dim();
        Basis {
            m,
            n,
            len: 0,
            v: Vec::with_capacity(n * capacity),
            mv: Vec::with_capacity(n * capacity),
        }
    }

    fn clear(&mut self) {
        self.len = 0;
        self.v.clear();
        self.mv.clear();
    }

    fn view(&self) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.v[..self.n * self.len], self.n, self.len)
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.v[j * self.n..(j + 1) * self.n]
    }

    fn m_column(&self, j: usize) -> &[f64] {
        &self.mv[j * self.n..(j + 1) * self.n]
    }

    /// Appends a column that is already M-orthonormal to the basis.
    fn push_trusted(&mut self, w: &[f64]) {
        let mw = self.m.mul_vec(w);
        self.v.extend_from_slice(w);
        self.mv.extend_from_slice(&mw);
        self.len += 1;
    }

    fn mul_m(&self, w: &DMatrix<f64>) -> DMatrix<f64> {
        let cols: Vec<Vec<f64>> = (0..w.ncols())
            .into_par_iter()
            .map(|j| self.m.mul_vec(w.column(j).as_slice()))
            .collect();
        DMatrix::from_fn(self.n, w.ncols(), |i, j| cols[j][i])
    }

    /// M-orthogonalizes the columns of `w` against the basis (two block
    /// Gram-Schmidt passes) and among themselves, appending the independent
    /// ones. Returns the indices of the appended columns.
    fn extend(&mut self, mut w: DMatrix<f64>) -> Vec<usize> {
        let n = self.n;
        let b = w.ncols();
        let mw0 = self.mul_m(&w);
        let norm0: Vec<f64> = (0..b).map(|j| w.column(j).dot(&mw0.column(j)).max(0.0).sqrt()).collect();
        if self.len > 0 {
            for _ in 0..2 {
                let mv = DMatrixView::from_slice(&self.mv[..n * self.len], n, self.len);
                let c = (w.transpose() * mv).transpose();
                w.gemm(-1.0, &self.view(), &c, 1.0);
            }
        }
        let mut mw = self.mul_m(&w);
        let mut added = Vec::new();
        let first_new = self.len;
        for j in 0..b {
            if !(norm0[j] > 0.0) || !norm0[j].is_finite() {
                continue;
            }
            for _ in 0..2 {
                for k in first_new..self.len {
                    let coef = dot(self.m_column(k), &w.as_slice()[j * n..(j + 1) * n]);
                    let (vk, mvk) = (self.column(k), self.m_column(k));
                    for (x, y) in w.as_mut_slice()[j * n..(j + 1) * n].iter_mut().zip(vk) {
                        *x -= coef * y;
                    }
                    for (x, y) in mw.as_mut_slice()[j * n..(j + 1) * n].iter_mut().zip(mvk) {
                        *x -= coef * y;
                    }
                }
            }
            let norm = w.column(j).dot(&mw.column(j)).max(0.0).sqrt();
            if norm < 1e-10 * norm0[j] {
                continue;
            }
            let col: Vec<f64> = w.column(j).iter().map(|x| x / norm).collect();
            self.push_trusted(&col);
            added.push(self.len - 1);
        }
        added
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn factor_shifted(k: &SparseSymMatrix, m: &SparseSymMatrix) -> Result<(EnvelopeCholesky, f64), EigenError> {
    let (tk, tm) = (k.trace(), m.trace());
    let mut shift = if tk > 0.0 && tm > 0.0 { 1e-4 * tk / tm } else { 1.0 };
    for _ in 0..30 {
        match EnvelopeCholesky::factor(&k.add_scaled(m, shift)) {
            Ok(chol) => return Ok((chol, shift)),
            Err(_) => shift *= 2.0,
        }
    }
    Err(EigenError::NotPositiveDefinite)
}

pub fn solve_lowest_with(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    count: usize,
    opts: &SolverOptions,
) -> Result<Vec<EigenPair>, EigenError> {
    let n = k.dim();
    if m.dim() != n {
        return Err(EigenError::DimensionMismatch(n, m.dim()));
    }
    if count == 0 || count > n {
        return Err(EigenError::InvalidCount { requested: count, dim: n });
    }
    if !(opts.tol >= 1e-12) {
        return Err(EigenError::InvalidTolerance(opts.tol));
    }
    let (chol, _shift) = factor_shifted(k, m)?;

    let block = opts.block_size.unwrap_or((count / 8).clamp(8, 24)).clamp(1, n);
    let keep = n.min(count + (count / 4).max(10));
    let width = n.min(2 * keep + block);
    let budget = opts.max_applications.unwrap_or(500 * count).max(width);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis = Basis::new(m, width);
    let random_block = |rng: &mut ChaCha8Rng, b: usize| DMatrix::from_fn(n, b, |_, _| rng.gen_range(-1.0..1.0));
    let mut pending = random_block(&mut rng, block);
    let mut applications = 0;
    let mut worst;

    loop {
        // grow the Krylov basis block by block
        let mut stalls = 0;
        while basis.len < width {
            let room = width - basis.len;
            if pending.ncols() > room {
                pending = pending.columns(0, room).into_owned();
            }
            let sources = basis.extend(pending);
            if basis.len >= width {
                break;
            }
            if sources.is_empty() {
                stalls += 1;
                if stalls > 10 {
                    break;
                }
                pending = random_block(&mut rng, block);
                continue;
            }
            let cols: Vec<Vec<f64>> = sources.par_iter().map(|&i| chol.solve(basis.m_column(i))).collect();
            applications += cols.len();
            pending = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
        }

        // Rayleigh-Ritz with K on the M-orthonormal basis
        let q = basis.len;
        let kv: Vec<Vec<f64>> = (0..q).into_par_iter().map(|j| k.mul_vec(basis.column(j))).collect();
        let mut kmat = DMatrix::zeros(n, q);
        for (j, col) in kv.iter().enumerate() {
            kmat.column_mut(j).copy_from_slice(col);
        }
        let mut h = kmat.transpose() * basis.view();
        h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..q).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let nkeep = keep.min(q);
        let s = DMatrix::from_fn(q, nkeep, |i, j| eig.eigenvectors[(i, idx[j])]);
        let y = basis.view() * &s;
        let ky = &kmat * &s;

        let ritz: Vec<(f64, Vec<f64>, f64)> = (0..nkeep)
            .into_par_iter()
            .map(|j| {
                let yj: Vec<f64> = y.column(j).iter().cloned().collect();
                let kyj: Vec<f64> = ky.column(j).iter().cloned().collect();
                let myj = m.mul_vec(&yj);
                let theta = dot(&yj, &kyj) / dot(&yj, &myj);
                let r: Vec<f64> = kyj.iter().zip(&myj).map(|(a, b)| a - theta * b).collect();
                let res = norm2(&r) / ((1.0 + theta.abs()) * norm2(&myj));
                (theta, yj, res)
            })
            .collect();

        worst = ritz[..count].iter().map(|r| r.2).fold(0.0, f64::max);
        if worst <= opts.tol {
            let mut pairs: Vec<EigenPair> = ritz
                .into_iter()
                .take(count)
                .map(|(theta, mut v, _)| {
                    let norm = m.bilinear(&v, &v).sqrt();
                    v.iter_mut().for_each(|x| *x /= norm);
                    fix_sign(&mut v);
                    EigenPair {
                        lambda: theta.max(0.0),
                        vector: v,
                    }
                })
                .collect();
            pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
            return Ok(pairs);
        }
        if applications >= budget || q == n {
            break;
        }

        // restart from the retained Ritz vectors, expanding the unconverged ones
        basis.clear();
        let mut unconverged = Vec::new();
        for (j, (_, yj, res)) in ritz.iter().enumerate() {
            basis.push_trusted(yj);
            if *res > opts.tol && unconverged.len() < block {
                unconverged.push(j);
            }
        }
        let cols: Vec<Vec<f64>> = unconverged.par_iter().map(|&i| chol.solve(basis.m_column(i))).collect();
        applications += cols.len();
        pending = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    }

    Err(EigenError::NoConvergence {
        iterations: applications,
        worst_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_solve, residual};
    use crate::fem::assemble;
    use crate::mesh::build_mesh;
    use crate::net::{build_net, PolyhedronKind};

    #[test]
    fn matches_dense_on_small_meshes() {
        for kind in PolyhedronKind::ALL {
            for r in [1, 2, 3] {
                let mesh = build_mesh(&build_net(kind), r).unwrap();
                let (k, m) = assemble(&mesh).unwrap();
                let want = 20.min(k.dim());
                let sparse = solve_lowest(&k, &m, want, 1e-10, 7).unwrap();
                let dense = dense_solve(&k, &m).unwrap();
                for (a, b) in sparse.iter().zip(&dense) {
                    assert!((a.lambda - b.lambda).abs() < 1e-8, "{kind} r={r}: {} vs {}", a.lambda, b.lambda);
                }
            }
        }
    }

    #[test]
    fn contracts_hold() {
        let mesh = build_mesh(&build_net(PolyhedronKind::Octahedron), 8).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let pairs = solve_lowest(&k, &m, 12, 1e-9, 1).unwrap();
        assert!(pairs[0].lambda.abs() < 1e-9);
        for (i, p) in pairs.iter().enumerate() {
            assert!(residual(&k, &m, p) <= 1e-9);
            assert!((m.bilinear(&p.vector, &p.vector) - 1.0).abs() < 1e-10);
            for q in &pairs[..i] {
                assert!(m.bilinear(&p.vector, &q.vector).abs() < 1e-8);
            }
        }
        assert!(pairs.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn reproducible_for_a_seed() {
        let mesh = build_mesh(&build_net(PolyhedronKind::Cube), 5).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let a = solve_lowest(&k, &m, 6, 1e-9, 3).unwrap();
        let b = solve_lowest(&k, &m, 6, 1e-9, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn argument_checks() {
        let mesh = build_mesh(&build_net(PolyhedronKind::Tetrahedron), 1).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        assert!(matches!(solve_lowest(&k, &m, 0, 1e-9, 0), Err(EigenError::InvalidCount { .. })));
        assert!(matches!(solve_lowest(&k, &m, 5, 1e-9, 0), Err(EigenError::InvalidCount { .. })));
        assert!(matches!(solve_lowest(&k, &m, 2, 1e-13, 0), Err(EigenError::InvalidTolerance(_))));
    }

    #[test]
    fn tiny_budget_reports_no_convergence() {
        let mesh = build_mesh(&build_net(PolyhedronKind::Icosahedron), 6).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        let opts = SolverOptions {
            tol: 1e-12,
            seed: 0,
            max_applications: Some(1),
            block_size: Some(2),
        };
        match solve_lowest_with(&k, &m, 30, &opts) {
            Err(EigenError::NoConvergence { worst_residual, .. }) => assert!(worst_residual > 1e-12),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
