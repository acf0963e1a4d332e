use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn polyspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyspec"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn mesh_reports_counts() {
    let dir = TempDir::new().unwrap();
    let out = polyspec(dir.path(), &["mesh", "--polyhedron", "tetrahedron", "--resolution", "128"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "planarCount 33153"));
    assert!(text.lines().any(|l| l.starts_with("dofCount ")));

    let out = polyspec(
        dir.path(),
        &["mesh", "--polyhedron", "cube", "--resolution", "1", "--describe"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("face ")).count(), 6);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(polyspec(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        polyspec(dir.path(), &["mesh", "--polyhedron", "cube", "--resolution", "2", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        polyspec(dir.path(), &["mesh", "--polyhedron", "cube", "--resolution", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(polyspec(dir.path(), &["--help"]).status.code(), Some(0));
    let bad_orbit = polyspec(
        dir.path(),
        &[
            "analytic", "--polyhedron", "tetrahedron", "--eval", "--type", "1-", "--orbit", "4,0", "--grid", "5",
            "--out", "f.csv",
        ],
    );
    assert_eq!(bad_orbit.status.code(), Some(1));
    assert_eq!(String::from_utf8(bad_orbit.stderr).unwrap().lines().count(), 1);
    assert!(!dir.path().join("f.csv").exists());
    let incomplete = polyspec(
        dir.path(),
        &[
            "count", "--polyhedron", "cube", "--source", "exact", "--tmax", "5", "--samples", "3", "--out", "c.csv",
        ],
    );
    assert_eq!(incomplete.status.code(), Some(1));
}

#[test]
fn cube_solve_finds_the_first_integer() {
    let dir = TempDir::new().unwrap();
    let args = [
        "solve", "--polyhedron", "cube", "--resolution", "32", "--num-eigs", "10", "--seed", "1", "--out", "e.csv",
    ];
    assert!(polyspec(dir.path(), &args).status.success());
    let (header, rows) = csv(&dir.path().join("e.csv"));
    assert_eq!(header, ["index", "lambda", "normalized"]);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[9][0], "10");
    let v: f64 = rows[9][2].parse().unwrap();
    assert!((v / 2.0 - 1.0).abs() < 0.01, "{v}");

    let first = fs::read(dir.path().join("e.csv")).unwrap();
    let mut again = args;
    again[10] = "e2.csv";
    assert!(polyspec(dir.path(), &again).status.success());
    assert_eq!(first, fs::read(dir.path().join("e2.csv")).unwrap());
}

#[test]
fn solve_dumps_matrices() {
    let dir = TempDir::new().unwrap();
    let out = polyspec(
        dir.path(),
        &[
            "solve", "--polyhedron", "tetrahedron", "--resolution", "2", "--num-eigs", "3", "--out", "e.csv",
            "--dump-matrices", "mat",
        ],
    );
    assert!(out.status.success());
    for name in ["mat_K.txt", "mat_M.txt"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[0], "0");
    }
}

#[test]
fn analytic_table_and_grid() {
    let dir = TempDir::new().unwrap();
    let out = polyspec(
        dir.path(),
        &["analytic", "--polyhedron", "tetrahedron", "--nmax", "31", "--out", "s.csv"],
    );
    assert!(out.status.success());
    let (header, rows) = csv(&dir.path().join("s.csv"));
    assert_eq!(header, ["N", "multiplicity", "tag"]);
    assert_eq!(rows.len(), 15);
    assert_eq!(rows[4], ["7", "6", "hexLattice"]);

    let out = polyspec(
        dir.path(),
        &["analytic", "--polyhedron", "octahedron", "--nmax", "5", "--out", "o.csv"],
    );
    assert!(out.status.success());
    let (_, rows) = csv(&dir.path().join("o.csv"));
    assert!(rows.iter().any(|r| r[0] == "4/3" && r[2] == "third"));

    let out = polyspec(
        dir.path(),
        &[
            "analytic", "--polyhedron", "octahedron", "--eval", "--type", "++", "--orbit", "2,0", "--grid", "9",
            "--enlarge", "--out", "g.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv(&dir.path().join("g.csv"));
    assert_eq!(header, ["x", "y", "value"]);
    assert!(!rows.is_empty() && rows.len() <= 81);
}

#[test]
fn extrapolate_geometric_sequences() {
    let dir = TempDir::new().unwrap();
    for (name, a, b) in [("a.csv", 1.4, 5.0), ("b.csv", 1.2, 4.5), ("c.csv", 1.1, 4.25)] {
        fs::write(dir.path().join(name), format!("index,lambda,normalized\n1,{a},{b}\n")).unwrap();
    }
    let out = polyspec(
        dir.path(),
        &["extrapolate", "--in", "a.csv", "b.csv", "c.csv", "--out", "x.csv"],
    );
    assert!(out.status.success());
    let (_, rows) = csv(&dir.path().join("x.csv"));
    let l: f64 = rows[0][1].parse().unwrap();
    let n: f64 = rows[0][2].parse().unwrap();
    assert!((l - 1.0).abs() < 1e-12 && (n - 4.0).abs() < 1e-12);
}

#[test]
fn count_exact_and_fem() {
    let dir = TempDir::new().unwrap();
    let out = polyspec(
        dir.path(),
        &[
            "count", "--polyhedron", "tetrahedron", "--source", "exact", "--tmax", "10", "--samples", "11", "--out",
            "c.csv",
        ],
    );
    assert!(out.status.success());
    let (header, rows) = csv(&dir.path().join("c.csv"));
    assert_eq!(header, ["t", "N", "D", "A", "g"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][..4], ["0", "1", "0.5", "0.5"]);
    assert_eq!(rows[1][1], "4");
    assert!(rows.iter().all(|r| !r[4].is_empty()));

    let out = polyspec(
        dir.path(),
        &[
            "count", "--polyhedron", "octahedron", "--source", "fem", "--resolution", "8", "--num-eigs", "30",
            "--tmax", "20", "--samples", "101", "--out", "f.csv",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
    let (_, rows) = csv(&dir.path().join("f.csv"));
    assert!(rows.len() > 1 && rows.len() < 101);
    assert!(rows.iter().skip(2).any(|r| r[4].is_empty()));
}

#[test]
fn classify_appends_columns() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("v.csv"),
        "index,lambda,normalized\n1,0,0\n2,1,8.06\n3,1,8.004\n",
    )
    .unwrap();
    let out = polyspec(dir.path(), &["classify", "--in", "v.csv", "--polyhedron", "cube", "--tol", "0.02"]);
    assert!(out.status.success());
    let (header, rows) = csv(&dir.path().join("v.csv"));
    assert_eq!(header, ["index", "lambda", "normalized", "class", "witness"]);
    assert_eq!(rows[1][3], "singular");
    assert_eq!(rows[2][3..], ["nonsingular", "8 (2;2)"]);
}

#[test]
fn slice_of_the_constant_mode() {
    let dir = TempDir::new().unwrap();
    let out = polyspec(
        dir.path(),
        &[
            "slice", "--polyhedron", "cube", "--resolution", "4", "--index", "1", "--y0", "0.5", "--samples", "9",
            "--out", "s.csv",
        ],
    );
    assert!(out.status.success());
    let (header, rows) = csv(&dir.path().join("s.csv"));
    assert_eq!(header, ["s", "value"]);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values.len(), 9);
    assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-9 && v.abs() > 0.1));

    let out = polyspec(
        dir.path(),
        &[
            "slice", "--polyhedron", "cube", "--resolution", "4", "--index", "1", "--y0", "7", "--samples", "9",
            "--out", "t.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}
