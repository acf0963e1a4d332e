use polyspec::analysis::{aitken_extrapolate, normalize};
use polyspec::eigen::{residual, solve_lowest, EigenPair};
use polyspec::fem::{assemble, SparseSymMatrix};
use polyspec::mesh::build_mesh;
use polyspec::net::{shared_net, PolyhedronKind};

fn problem(kind: PolyhedronKind, r: usize) -> (SparseSymMatrix, SparseSymMatrix) {
    assemble(&build_mesh(shared_net(kind), r).unwrap()).unwrap()
}

/// `V V^T` over a range of pairs, dense row-major.
fn projector(pairs: &[EigenPair]) -> Vec<f64> {
    let n = pairs[0].vector.len();
    let mut p = vec![0.0; n * n];
    for pair in pairs {
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] += pair.vector[i] * pair.vector[j];
            }
        }
    }
    p
}

#[test]
fn tetra_first_cluster_is_a_triple() {
    let (k, m) = problem(PolyhedronKind::Tetrahedron, 32);
    let pairs = solve_lowest(&k, &m, 4, 1e-9, 3).unwrap();
    let cluster: Vec<f64> = pairs[1..4]
        .iter()
        .map(|p| normalize(p.lambda, PolyhedronKind::Tetrahedron))
        .collect();
    for v in &cluster {
        assert!((v - 1.0).abs() < 0.01, "{v}");
    }
    let spread = (cluster[2] - cluster[0]) / cluster[0];
    assert!(spread <= 0.005);
    assert!(pairs.iter().all(|p| residual(&k, &m, p) <= 1e-9));
}

#[test]
fn single_pair_is_the_constant() {
    let (k, m) = problem(PolyhedronKind::Cube, 6);
    let pairs = solve_lowest(&k, &m, 1, 1e-9, 0).unwrap();
    assert!(pairs[0].lambda.abs() < 1e-9);
    let v = &pairs[0].vector;
    assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-8 * v[0].abs()));
    // M-normalized constant on a surface of area 6
    assert!((v[0] - 1.0 / 6f64.sqrt()).abs() < 1e-8);
}

#[test]
fn degenerate_cluster_projector_is_seed_independent() {
    let (k, m) = problem(PolyhedronKind::Octahedron, 6);
    let a = solve_lowest(&k, &m, 8, 1e-10, 1).unwrap();
    let b = solve_lowest(&k, &m, 8, 1e-10, 99).unwrap();
    // lambda_1 is a triple on the octahedron
    let gap = (a[3].lambda - a[1].lambda) / a[1].lambda;
    assert!(gap < 1e-6);
    let (pa, pb) = (projector(&a[1..4]), projector(&b[1..4]));
    let diff: f64 = pa.iter().zip(&pb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn refinement_lowers_eigenvalues_and_extrapolates() {
    let kind = PolyhedronKind::Tetrahedron;
    let levels: Vec<Vec<f64>> = [8, 16, 32]
        .iter()
        .map(|&r| {
            let (k, m) = problem(kind, r);
            solve_lowest(&k, &m, 5, 1e-10, 0)
                .unwrap()
                .iter()
                .map(|p| normalize(p.lambda, kind))
                .collect()
        })
        .collect();
    for i in 1..5 {
        assert!(levels[1][i] <= levels[0][i] + 1e-9);
        assert!(levels[2][i] <= levels[1][i] + 1e-9);
    }
    let target = [1.0, 1.0, 1.0, 3.0];
    for (i, t) in (1..5).zip(target) {
        let ext = aitken_extrapolate(levels[0][i], levels[1][i], levels[2][i]);
        assert!((ext / t - 1.0).abs() < 0.002, "#{i}: {ext}");
        assert!((ext - t).abs() < (levels[2][i] - t).abs());
    }
}
