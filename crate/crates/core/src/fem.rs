//! Linear finite elements: element matrices, sparse symmetric storage and assembly.

use std::io::{self, Write};

use nalgebra::{DMatrix, Matrix3};
use thiserror::Error;

use crate::mesh::SurfaceMesh;

/// Entries below this magnitude are dropped after assembly.
pub const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("degenerate element with area {0:e}")]
    DegenerateElement(f64),
}

/// Symmetric sparse matrix in compressed-row form; both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from `(i, j, v)` contributions. Each unordered pair is summed in
    /// input order and mirrored, so the result is exactly symmetric.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut upper: Vec<(usize, usize, f64)> = triplets
            .iter()
            .map(|&(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) })
            .collect();
        upper.sort_by_key(|&(i, j, _)| (i, j)); // stable: keeps input order per pair
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|&(_, _, v)| v.abs() >= DROP_TOL);

        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * merged.len());
        for &(i, j, v) in &merged {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        for &(i, _, _) in &full {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSymMatrix {
            n,
            row_ptr,
            col_idx: full.iter().map(|t| t.1).collect(),
            values: full.iter().map(|t| t.2).collect(),
        }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut trip = Vec::new();
        for i in 0..n {
            for j in i..n {
                trip.push((i, j, 0.5 * (a[(i, j)] + a[(j, i)])));
            }
        }
        Self::from_triplets(n, &trip)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().cloned().zip(self.values[range].iter().cloned())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    /// Upper-triangle entries `(i, j, v)` with `i <= j`, row-major.
    pub fn upper_triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// `P A P^T` where `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let trip: Vec<(usize, usize, f64)> = self
            .upper_triplets()
            .into_iter()
            .map(|(i, j, v)| (perm[i], perm[j], v))
            .collect();
        Self::from_triplets(self.n, &trip)
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// `self + s * other`, entrywise.
    pub fn add_scaled(&self, other: &SparseSymMatrix, s: f64) -> Self {
        let mut trip = self.upper_triplets();
        trip.extend(other.upper_triplets().into_iter().map(|(i, j, v)| (i, j, s * v)));
        Self::from_triplets(self.n, &trip)
    }

    /// Coordinate dump: one `row col value` line per stored entry, 0-based.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {}", i, j, format_g17(v))?;
            }
        }
        Ok(())
    }
}

/// `%.17g` style formatting.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, e) = sci.split_once('e').unwrap();
    let exp: i32 = e.parse().unwrap();
    if (-4..17).contains(&exp) {
        trim_zeros(&format!("{:.*}", (16 - exp) as usize, v))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// P1 stiffness and consistent mass matrices of one triangle.
pub fn element_matrices(v: [[f64; 2]; 3]) -> Result<(Matrix3<f64>, Matrix3<f64>), FemError> {
    let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
    if area < 1e-14 {
        return Err(FemError::DegenerateElement(area));
    }
    // gradients of the hat functions are (b_i, c_i) / (2A)
    let b = [v[1][1] - v[2][1], v[2][1] - v[0][1], v[0][1] - v[1][1]];
    let c = [v[2][0] - v[1][0], v[0][0] - v[2][0], v[1][0] - v[0][0]];
    let stiffness = Matrix3::from_fn(|i, j| (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
    let mass = Matrix3::from_fn(|i, j| if i == j { area / 6.0 } else { area / 12.0 });
    Ok((stiffness, mass))
}

/// Global stiffness `K` and mass `M` over the mesh DOFs.
pub fn assemble(mesh: &SurfaceMesh) -> Result<(SparseSymMatrix, SparseSymMatrix), FemError> {
    let mut kt = Vec::with_capacity(6 * mesh.elements.len());
    let mut mt = Vec::with_capacity(6 * mesh.elements.len());
    for e in 0..mesh.elements.len() {
        let (ke, me) = element_matrices(mesh.element_vertices(e))?;
        let d = mesh.element_dofs(e);
        for a in 0..3 {
            for b in a..3 {
                kt.push((d[a], d[b], ke[(a, b)]));
                mt.push((d[a], d[b], me[(a, b)]));
            }
        }
    }
    let n = mesh.dof_count;
    Ok((SparseSymMatrix::from_triplets(n, &kt), SparseSymMatrix::from_triplets(n, &mt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use crate::net::{build_net, PolyhedronKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Degree-2 exact quadrature on a triangle (edge midpoints) for products of
    /// linear functions, plus finite-difference gradients.
    fn quadrature_oracle(v: [[f64; 2]; 3]) -> (Matrix3<f64>, Matrix3<f64>) {
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        let hat = |i: usize, p: [f64; 2]| {
            let (a, b) = (v[(i + 1) % 3], v[(i + 2) % 3]);
            let s = |q: [f64; 2]| 0.5 * ((a[0] - q[0]) * (b[1] - q[1]) - (b[0] - q[0]) * (a[1] - q[1]));
            s(p) / area
        };
        let mids: Vec<[f64; 2]> = (0..3)
            .map(|k| {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
            })
            .collect();
        let h = 1e-6;
        let grad = |i: usize| {
            let p = v[0];
            [
                (hat(i, [p[0] + h, p[1]]) - hat(i, [p[0] - h, p[1]])) / (2.0 * h),
                (hat(i, [p[0], p[1] + h]) - hat(i, [p[0], p[1] - h])) / (2.0 * h),
            ]
        };
        let k = Matrix3::from_fn(|i, j| {
            let (gi, gj) = (grad(i), grad(j));
            area * (gi[0] * gj[0] + gi[1] * gj[1])
        });
        let m = Matrix3::from_fn(|i, j| mids.iter().map(|&q| hat(i, q) * hat(j, q)).sum::<f64>() * area / 3.0);
        (k, m)
    }

    #[test]
    fn right_triangle() {
        let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let (k, m) = element_matrices(v).unwrap();
        let k_exp = Matrix3::new(1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5);
        let m_exp = Matrix3::new(2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0) / 24.0;
        assert!((k - k_exp).norm() < 1e-15);
        assert!((m - m_exp).norm() < 1e-15);
        let (ko, mo) = quadrature_oracle(v);
        assert!((k - ko).norm() < 1e-8);
        assert!((m - mo).norm() < 1e-14);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let v = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let (k, m) = element_matrices(v).unwrap();
        let s3 = 3f64.sqrt();
        for i in 0..3 {
            assert!((k[(i, i)] - 1.0 / s3).abs() < 1e-14);
            assert!(k.row(i).sum().abs() < 1e-14);
            for j in 0..3 {
                if i != j {
                    assert!((k[(i, j)] + 0.5 / s3).abs() < 1e-14);
                }
            }
        }
        let (ko, mo) = quadrature_oracle(v);
        assert!((k - ko).norm() < 1e-8);
        assert!((m - mo).norm() < 1e-14);
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let v = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(matches!(element_matrices(v), Err(FemError::DegenerateElement(_))));
        let cw = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        assert!(element_matrices(cw).is_err());
    }

    #[test]
    fn constants_in_kernel_and_mass_gives_area() {
        for kind in PolyhedronKind::ALL {
            for r in [1, 3] {
                let mesh = build_mesh(&build_net(kind), r).unwrap();
                let (k, m) = assemble(&mesh).unwrap();
                let ones = vec![1.0; k.dim()];
                assert!(k.mul_vec(&ones).iter().all(|x| x.abs() < 1e-12), "{kind}");
                let area = m.bilinear(&ones, &ones);
                assert!((area - kind.area()).abs() < 1e-12 * kind.area(), "{kind}: {area}");
            }
        }
    }

    #[test]
    fn kernel_is_one_dimensional() {
        for kind in PolyhedronKind::ALL {
            let mesh = build_mesh(&build_net(kind), 2).unwrap();
            let (k, _) = assemble(&mesh).unwrap();
            let eig = k.to_dense().symmetric_eigenvalues();
            let zeros = eig.iter().filter(|x| x.abs() < 1e-10).count();
            assert_eq!(zeros, 1, "{kind}");
        }
    }

    #[test]
    fn random_quadratic_forms_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in PolyhedronKind::ALL {
            let mesh = build_mesh(&build_net(kind), 3).unwrap();
            let (k, m) = assemble(&mesh).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..k.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                assert!(k.bilinear(&x, &x) >= -1e-12);
                assert!(m.bilinear(&x, &x) > 0.0);
            }
        }
    }

    #[test]
    fn storage_is_exactly_symmetric_without_small_entries() {
        let mesh = build_mesh(&build_net(PolyhedronKind::Cube), 4).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        for a in [&k, &m] {
            for i in 0..a.dim() {
                for (j, v) in a.row(i) {
                    assert_eq!(a.get(j, i), v);
                    assert!(v.abs() >= DROP_TOL);
                }
            }
        }
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in PolyhedronKind::ALL {
            for r in [1, 2] {
                let mesh = build_mesh(&build_net(kind), r).unwrap();
                let (k, m) = assemble(&mesh).unwrap();
                let n = k.dim();
                let mut perm: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                let mut relabeled = mesh.clone();
                for d in relabeled.dof_of.iter_mut() {
                    *d = perm[*d];
                }
                let (kp, mp) = assemble(&relabeled).unwrap();
                let (kd, kpd) = (k.permuted(&perm).to_dense(), kp.to_dense());
                assert!((kd - kpd).amax() < 1e-14);
                assert!((m.permuted(&perm).to_dense() - mp.to_dense()).amax() < 1e-14);
            }
        }
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(1e20), "1e+20");
    }
}
