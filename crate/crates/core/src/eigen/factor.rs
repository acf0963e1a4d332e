//! Reverse Cuthill-McKee ordering and envelope (profile) Cholesky factorization.

use std::collections::VecDeque;

use crate::fem::SparseSymMatrix;

use super::EigenError;

/// Reverse Cuthill-McKee permutation: `order[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(|r| r.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(&adj, &degree, seed);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().cloned().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    level
}

fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut node = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let level = bfs_levels(adj, node);
        let far = level.iter().filter(|&&l| l != usize::MAX).max().cloned().unwrap_or(0);
        if far <= ecc && node != seed {
            break;
        }
        ecc = far;
        let candidate = (0..adj.len())
            .filter(|&i| level[i] == far)
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        if candidate == node {
            break;
        }
        node = candidate;
    }
    node
}

/// Lower-triangular Cholesky factor of `P A P^T` in row envelope storage.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    /// `order[new] = old`
    order: Vec<usize>,
    /// first stored column of each row
    first: Vec<usize>,
    /// offset of row `i`'s first entry; row `i` occupies `start[i]..start[i+1]`
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymMatrix) -> Result<Self, EigenError> {
        let n = a.dim();
        let order = reverse_cuthill_mckee(a);
        let mut inverse = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inverse[old];
            for (j_old, _) in a.row(old) {
                let j = inverse[j_old];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for old in 0..n {
            let i = inverse[old];
            for (j_old, v) in a.row(old) {
                let j = inverse[j_old];
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_i = &data[start[i] + k0 - fi..start[i] + j - fi];
                let row_j = &data[start[j] + k0 - fj..start[j] + j - fj];
                let dot: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
                let ljj = data[start[j + 1] - 1];
                let idx = start[i] + j - fi;
                data[idx] = (data[idx] - dot) / ljj;
            }
            let row = &data[start[i]..start[i + 1] - 1];
            let sq: f64 = row.iter().map(|x| x * x).sum();
            let d = data[start[i + 1] - 1] - sq;
            if !(d > 0.0) || !d.is_finite() {
                return Err(EigenError::NotPositiveDefinite);
            }
            data[start[i + 1] - 1] = d.sqrt();
        }
        Ok(EnvelopeCholesky {
            n,
            order,
            first,
            start,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.order.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1] - 1];
            let dot: f64 = row.iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - dot) / self.data[self.start[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.data[self.start[i + 1] - 1];
            let xi = y[i];
            let row = &self.data[self.start[i]..self.start[i + 1] - 1];
            for (yj, l) in y[fi..i].iter_mut().zip(row) {
                *yj -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
