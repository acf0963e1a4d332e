//! Command-line front end: meshing, eigen-solves, closed-form spectra,
//! extrapolation, counting remainders, classification and line slices.
//!
//! Every file is written to a temporary sibling and renamed into place.
//! Real numbers are printed with 17 significant digits.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use polyspec::analysis::{
    classify, normalize, remainder_row, AnalysisError, CountingSeries, Units, DEFAULT_CLASSIFY_TOL,
};
use polyspec::analytic::{build_trig_eigenfunction, enlarge, exact_spectrum, AnalyticError, SymmetryType};
use polyspec::eigen::{solve_lowest, EigenError, EigenPair, DEFAULT_TOL};
use polyspec::fem::{assemble, format_g17, FemError, SparseSymMatrix};
use polyspec::mesh::{build_mesh, MeshError, SurfaceMesh};
use polyspec::net::{shared_net, PolyhedronKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "polyspec", version, about = "Laplacian spectra of polyhedral surfaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the mesh and print vertex, DOF and element counts.
    Mesh(MeshArgs),
    /// Lowest eigenvalues as `index,lambda,normalized`.
    Solve(SolveArgs),
    /// Closed-form spectrum lines, or a grid of one closed-form eigenfunction.
    Analytic(AnalyticArgs),
    /// Geometric extrapolation of three solves at resolutions r, 2r, 4r.
    Extrapolate(ExtrapolateArgs),
    /// Counting function and remainders `t,N,D,A,g`.
    Count(CountArgs),
    /// Append `class,witness` to an eigenvalue file.
    Classify(ClassifyArgs),
    /// Eigenfunction values along a horizontal line of the net.
    Slice(SliceArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub polyhedron: PolyhedronKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub resolution: u64,
    /// Also list faces, glued edges and cone points.
    #[arg(long)]
    pub describe: bool,
}

#[derive(Debug, Args, Clone)]
pub struct FemArgs {
    #[arg(long)]
    pub polyhedron: PolyhedronKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub resolution: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub fem: FemArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub num_eigs: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write `PREFIX_K.txt` and `PREFIX_M.txt` as `row col value` lists.
    #[arg(long, value_name = "PREFIX")]
    pub dump_matrices: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub polyhedron: PolyhedronKind,
    /// Largest normalized value listed.
    #[arg(long, required_unless_present = "eval", value_parser = nonnegative)]
    pub nmax: Option<f64>,
    /// Evaluate one eigenfunction on a grid instead of listing the spectrum.
    #[arg(long, requires_all = ["sym_type", "orbit", "grid"])]
    pub eval: bool,
    #[arg(long = "type", value_name = "TYPE")]
    pub sym_type: Option<SymmetryType>,
    /// Lattice orbit `k,j`.
    #[arg(long, value_parser = parse_orbit)]
    pub orbit: Option<(i64, i64)>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: Option<u64>,
    /// Evaluate the enlarged function (octahedron only).
    #[arg(long)]
    pub enlarge: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtrapolateArgs {
    /// Files at resolutions r, 2r and 4r.
    #[arg(long = "in", num_args = 3, required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Source {
    Fem,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum UnitsArg {
    Normalized,
    Raw,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub polyhedron: PolyhedronKind,
    #[arg(long, value_enum)]
    pub source: Source,
    #[arg(long, value_parser = positive)]
    pub tmax: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = UnitsArg::Normalized)]
    pub units: UnitsArg,
    /// Mesh resolution for `--source fem`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub resolution: Option<u64>,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub num_eigs: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// File with a `normalized` column.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub polyhedron: PolyhedronKind,
    #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL, value_parser = positive)]
    pub tol: f64,
    /// Defaults to rewriting the input file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[command(flatten)]
    pub fem: FemArgs,
    /// 1-based eigenpair index, as in the `solve` output.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub index: u64,
    /// Eigenpairs to compute; defaults to `index`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub num_eigs: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative number, got `{s}`")),
    }
}

fn parse_orbit(s: &str) -> Result<(i64, i64), String> {
    let (k, j) = s.split_once(',').ok_or_else(|| format!("expected `k,j`, got `{s}`"))?;
    let k = k.trim().parse().map_err(|_| format!("bad k in `{s}`"))?;
    let j = j.trim().parse().map_err(|_| format!("bad j in `{s}`"))?;
    Ok((k, j))
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// exit status: 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match execute(&config, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command, writing console output to `console`.
pub fn execute<W: Write>(config: &RunConfig, console: &mut W) -> Result<(), CliError> {
    match &config.command {
        Command::Mesh(a) => cmd_mesh(a, console),
        Command::Solve(a) => cmd_solve(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Extrapolate(a) => cmd_extrapolate(a),
        Command::Count(a) => cmd_count(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Slice(a) => cmd_slice(a),
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn g17(v: f64) -> String {
    format_g17(v)
}

fn mesh_for(kind: PolyhedronKind, r: u64) -> Result<SurfaceMesh, CliError> {
    Ok(build_mesh(shared_net(kind), r as usize)?)
}

fn solve_mesh(
    mesh: &SurfaceMesh,
    count: u64,
    fem: &FemArgs,
) -> Result<(SparseSymMatrix, SparseSymMatrix, Vec<EigenPair>), CliError> {
    let (k, m) = assemble(mesh)?;
    let count = count as usize;
    if count > mesh.dof_count {
        return Err(CliError::Domain(format!(
            "requested {count} eigenpairs but the mesh has {} degrees of freedom",
            mesh.dof_count
        )));
    }
    let pairs = solve_lowest(&k, &m, count, fem.tol, fem.seed)?;
    Ok((k, m, pairs))
}

fn cmd_mesh<W: Write>(a: &MeshArgs, console: &mut W) -> Result<(), CliError> {
    let mesh = mesh_for(a.polyhedron, a.resolution)?;
    let mut text = String::new();
    let _ = writeln!(text, "polyhedron {}", a.polyhedron);
    let _ = writeln!(text, "resolution {}", a.resolution);
    let _ = writeln!(text, "planarCount {}", mesh.planar_count);
    let _ = writeln!(text, "dofCount {}", mesh.dof_count);
    let _ = writeln!(text, "elements {}", mesh.elements.len());
    let _ = writeln!(text, "area {}", g17(mesh.total_area()));
    if a.describe {
        text.push_str(&mesh.net.describe());
    }
    console.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn eigen_csv(kind: PolyhedronKind, lambdas: impl IntoIterator<Item = f64>) -> String {
    let mut out = String::from("index,lambda,normalized\n");
    for (i, l) in lambdas.into_iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, g17(l), g17(normalize(l, kind)));
    }
    out
}

fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let mesh = mesh_for(a.fem.polyhedron, a.fem.resolution)?;
    let (k, m, pairs) = solve_mesh(&mesh, a.num_eigs, &a.fem)?;
    if let Some(prefix) = &a.dump_matrices {
        for (suffix, mat) in [("_K.txt", &k), ("_M.txt", &m)] {
            let mut buf = Vec::new();
            mat.write_coordinate(&mut buf).expect("writing to memory");
            let mut path = prefix.clone().into_os_string();
            path.push(suffix);
            write_atomic(Path::new(&path), &String::from_utf8(buf).expect("ascii output"))?;
        }
    }
    write_atomic(&a.out, &eigen_csv(a.fem.polyhedron, pairs.iter().map(|p| p.lambda)))
}

fn cmd_analytic(a: &AnalyticArgs) -> Result<(), CliError> {
    if !a.eval {
        let nmax = a.nmax.expect("clap requires nmax without --eval");
        let mut out = String::from("N,multiplicity,tag\n");
        for line in exact_spectrum(a.polyhedron, nmax) {
            let _ = writeln!(out, "{},{},{}", line.label(), line.multiplicity, line.tag);
        }
        return write_atomic(&a.out, &out);
    }
    let (sym_type, orbit, grid) = match (a.sym_type, a.orbit, a.grid) {
        (Some(t), Some(o), Some(g)) => (t, o, g as usize),
        _ => unreachable!("clap enforces --type, --orbit and --grid with --eval"),
    };
    let mut f = build_trig_eigenfunction(a.polyhedron, sym_type, orbit)?;
    if a.enlarge {
        f = enlarge(&f)?;
    }
    let net = shared_net(a.polyhedron);
    let [x0, x1, y0, y1] = net.bounding_box();
    let mut out = String::from("x,y,value\n");
    for iy in 0..grid {
        let y = y0 + (y1 - y0) * iy as f64 / (grid - 1) as f64;
        for ix in 0..grid {
            let x = x0 + (x1 - x0) * ix as f64 / (grid - 1) as f64;
            match f.evaluate([x, y]) {
                Ok(v) => {
                    let _ = writeln!(out, "{},{},{}", g17(x), g17(y), g17(v));
                }
                Err(AnalyticError::OutOfDomain(..)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    write_atomic(&a.out, &out)
}

/// Parsed CSV: header names and rows of raw fields.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Input {
                path: path.to_path_buf(),
                message: "empty file".into(),
            })?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let rows = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
        Ok(Table { header, rows })
    }

    fn column(&self, name: &str, path: &Path) -> Result<usize, CliError> {
        self.header.iter().position(|h| h == name).ok_or_else(|| CliError::Input {
            path: path.to_path_buf(),
            message: format!("missing column `{name}`"),
        })
    }

    fn numbers(&self, name: &str, path: &Path) -> Result<Vec<f64>, CliError> {
        let c = self.column(name, path)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.get(c).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| CliError::Input {
                    path: path.to_path_buf(),
                    message: format!("row {} has no numeric `{name}`", i + 2),
                })
            })
            .collect()
    }
}

fn cmd_extrapolate(a: &ExtrapolateArgs) -> Result<(), CliError> {
    let mut lambdas = Vec::new();
    let mut normalized = Vec::new();
    for path in &a.inputs {
        let t = Table::read(path)?;
        lambdas.push(t.numbers("lambda", path)?);
        normalized.push(t.numbers("normalized", path)?);
    }
    let rows = lambdas.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = String::from("index,lambda,normalized\n");
    for i in 0..rows {
        let l = polyspec::analysis::aitken_extrapolate(lambdas[0][i], lambdas[1][i], lambdas[2][i]);
        let n = polyspec::analysis::aitken_extrapolate(normalized[0][i], normalized[1][i], normalized[2][i]);
        let _ = writeln!(out, "{},{},{}", i + 1, g17(l), g17(n));
    }
    write_atomic(&a.out, &out)
}

/// Largest normalized value the exact tetrahedron series is built to.
const EXACT_COUNT_LIMIT: f64 = 4.0e6;

fn cmd_count(a: &CountArgs) -> Result<(), CliError> {
    let units = match a.units {
        UnitsArg::Normalized => Units::Normalized,
        UnitsArg::Raw => Units::Raw,
    };
    let series = match a.source {
        Source::Exact => {
            if a.polyhedron != PolyhedronKind::Tetrahedron {
                return Err(CliError::Domain(format!(
                    "the exact spectrum of the {} is not known in full; use --source fem",
                    a.polyhedron
                )));
            }
            let to_normalized = |t: f64| match units {
                Units::Raw => normalize(t, a.polyhedron),
                Units::Normalized => t,
            };
            let reach = to_normalized(a.tmax.max(a.tmax * a.tmax)).min(EXACT_COUNT_LIMIT.max(to_normalized(a.tmax)));
            CountingSeries::exact_tetrahedron(reach, units)
        }
        Source::Fem => {
            let resolution = a
                .resolution
                .ok_or_else(|| CliError::Domain("--source fem needs --resolution".into()))?;
            let fem = FemArgs {
                polyhedron: a.polyhedron,
                resolution,
                tol: a.tol,
                seed: a.seed,
            };
            let mesh = mesh_for(a.polyhedron, resolution)?;
            let (_, _, pairs) = solve_mesh(&mesh, a.num_eigs, &fem)?;
            let raw: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
            CountingSeries::from_raw(a.polyhedron, &raw, units)
        }
    };
    let samples = a.samples as usize;
    let grid: Vec<f64> = (0..samples)
        .map(|i| {
            if i + 1 == samples {
                a.tmax
            } else {
                a.tmax * i as f64 / (samples - 1) as f64
            }
        })
        .collect();
    let covered: Vec<f64> = grid.iter().cloned().filter(|&t| series.covers(t)).collect();
    if covered.len() < grid.len() {
        eprintln!(
            "warning: spectrum covers t < {}; truncating at t = {}",
            g17(series.coverage()),
            covered.last().map_or("none".to_string(), |&t| g17(t))
        );
    }
    let mut out = String::from("t,N,D,A,g\n");
    for t in covered {
        let row = remainder_row(&series, t);
        let g = row.g.map(g17).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", g17(row.t), row.n, g17(row.d), g17(row.a), g);
    }
    write_atomic(&a.out, &out)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<(), CliError> {
    let table = Table::read(&a.input)?;
    let values = table.numbers("normalized", &a.input)?;
    let mut out = table.header.join(",");
    out.push_str(",class,witness\n");
    for (row, v) in table.rows.iter().zip(values) {
        let c = classify(v, a.polyhedron, a.tol);
        let _ = writeln!(out, "{},{},{}", row.join(","), c.class_name(), c.witness_label());
    }
    write_atomic(a.out.as_deref().unwrap_or(&a.input), &out)
}

/// `x` range where the line `y = y0` meets the net.
fn line_extent(mesh: &SurfaceMesh, y0: f64) -> Option<(f64, f64)> {
    let net = &mesh.net;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (f, face) in net.faces.iter().enumerate() {
        let n = face.corners.len();
        for e in 0..n {
            let p = net.corner_position(f, e);
            let q = net.corner_position(f, (e + 1) % n);
            let (ya, yb) = (p[1].min(q[1]), p[1].max(q[1]));
            if y0 < ya - 1e-12 || y0 > yb + 1e-12 {
                continue;
            }
            let xs = if (q[1] - p[1]).abs() < 1e-14 {
                vec![p[0], q[0]]
            } else {
                vec![p[0] + (y0 - p[1]) / (q[1] - p[1]) * (q[0] - p[0])]
            };
            for x in xs {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// P1 values of `vector` at `samples` equally spaced points across the net
/// along `y = y0`, as `(x, value)`.
pub fn slice(mesh: &SurfaceMesh, vector: &[f64], y0: f64, samples: usize) -> Result<Vec<(f64, f64)>, MeshError> {
    let (lo, hi) = line_extent(mesh, y0).ok_or(MeshError::OutOfDomain(f64::NAN, y0))?;
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let x = if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            mesh.interpolate(vector, [x, y0]).map(|v| (x, v))
        })
        .collect()
}

fn cmd_slice(a: &SliceArgs) -> Result<(), CliError> {
    let count = a.num_eigs.unwrap_or(a.index);
    if count < a.index {
        return Err(CliError::Domain(format!(
            "--num-eigs {count} is below --index {}",
            a.index
        )));
    }
    let mesh = mesh_for(a.fem.polyhedron, a.fem.resolution)?;
    let (_, _, pairs) = solve_mesh(&mesh, count, &a.fem)?;
    let pair = &pairs[a.index as usize - 1];
    let mut out = String::from("s,value\n");
    for (s, v) in slice(&mesh, &pair.vector, a.y0, a.samples as usize)? {
        let _ = writeln!(out, "{},{}", g17(s), g17(v));
    }
    write_atomic(&a.out, &out)
}
