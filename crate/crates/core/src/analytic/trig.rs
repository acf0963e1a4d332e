//! Closed-form eigenfunctions of one-dimensional symmetry type.
//!
//! On the triangle-faced solids a function of one-dimensional type is a
//! finite cosine or sine sum on the plane that transforms under the
//! reflections of the unit triangle tiling by a sign depending only on the
//! reflection family: face bisectors or edge lines. On the cube the families
//! are the face diagonals (which also fixes the sign of the edge lines) and
//! the mid-lines parallel to the edges. The value at any point of the net is
//! found by folding the point into a fundamental domain of the tiling,
//! collecting one sign per reflection, and evaluating the sum there.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::net::{shared_net, FaceShape, PolyhedronKind};

use super::lattice::loeschian;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("inadmissible orbit: {0}")]
    InadmissibleOrbit(String),
    #[error("enlargement is only defined on the octahedron")]
    NotOctahedron,
    #[error("enlargement needs a base function of one-dimensional type")]
    NotOneDimensionalType,
    #[error("point ({0}, {1}) lies outside the net")]
    OutOfDomain(f64, f64),
    #[error("unknown symmetry type `{0}`")]
    UnknownType(String),
}

/// Dual lattice generators of the unit triangle tiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBasis {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl LatticeBasis {
    pub const HEX: LatticeBasis = LatticeBasis {
        u: [0.5, SQRT3 / 6.0],
        v: [0.0, SQRT3 / 3.0],
    };

    /// `a u + b v`.
    pub fn combine(&self, a: i64, b: i64) -> [f64; 2] {
        let (a, b) = (a as f64, b as f64);
        [a * self.u[0] + b * self.v[0], a * self.u[1] + b * self.v[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitIndex {
    pub k: i64,
    pub j: i64,
}

impl OrbitIndex {
    pub fn new(k: i64, j: i64) -> Self {
        OrbitIndex { k, j }
    }

    /// `k^2 + j^2 + kj` on the triangle-faced solids, `k^2 + j^2` on the cube.
    pub fn norm(&self, kind: PolyhedronKind) -> i64 {
        match kind {
            PolyhedronKind::Cube => self.k * self.k + self.j * self.j,
            _ => loeschian(self.k, self.j),
        }
    }

    pub fn is_generic(&self) -> bool {
        self.k > self.j && self.j > 0
    }
}

impl From<(i64, i64)> for OrbitIndex {
    fn from((k, j): (i64, i64)) -> Self {
        OrbitIndex { k, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryType {
    OnePlus,
    OneMinus,
    PP,
    MM,
    PM,
    MP,
}

impl SymmetryType {
    pub fn for_kind(kind: PolyhedronKind) -> &'static [SymmetryType] {
        match kind {
            PolyhedronKind::Tetrahedron | PolyhedronKind::Icosahedron => &[SymmetryType::OnePlus, SymmetryType::OneMinus],
            PolyhedronKind::Octahedron | PolyhedronKind::Cube => {
                &[SymmetryType::PP, SymmetryType::MM, SymmetryType::PM, SymmetryType::MP]
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SymmetryType::OnePlus => "1+",
            SymmetryType::OneMinus => "1-",
            SymmetryType::PP => "++",
            SymmetryType::MM => "--",
            SymmetryType::PM => "+-",
            SymmetryType::MP => "-+",
        }
    }

    /// Signs under the two reflection families: (face bisector, edge line) on
    /// the triangle tilings, (diagonal, mid-line) on the square tiling.
    pub fn signs(self) -> (f64, f64) {
        match self {
            SymmetryType::OnePlus | SymmetryType::PP => (1.0, 1.0),
            SymmetryType::OneMinus | SymmetryType::MM => (-1.0, -1.0),
            SymmetryType::PM => (1.0, -1.0),
            SymmetryType::MP => (-1.0, 1.0),
        }
    }
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryType {
    type Err = AnalyticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1+" | "oneplus" | "plus" => Ok(SymmetryType::OnePlus),
            "1-" | "oneminus" | "minus" => Ok(SymmetryType::OneMinus),
            "++" | "pp" | "1++" => Ok(SymmetryType::PP),
            "--" | "mm" | "1--" => Ok(SymmetryType::MM),
            "+-" | "pm" | "1+-" => Ok(SymmetryType::PM),
            "-+" | "mp" | "1-+" => Ok(SymmetryType::MP),
            _ => Err(AnalyticError::UnknownType(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waveform {
    Cos,
    Sin,
}

/// `sign * wave(2 pi frequency . (p - origin))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub sign: f64,
    pub waveform: Waveform,
    pub frequency: [f64; 2],
}

impl TrigTerm {
    fn eval(&self, q: [f64; 2]) -> f64 {
        let phase = 2.0 * PI * (self.frequency[0] * q[0] + self.frequency[1] * q[1]);
        self.sign
            * match self.waveform {
                Waveform::Cos => phase.cos(),
                Waveform::Sin => phase.sin(),
            }
    }

    pub fn frequency_norm_sq(&self) -> f64 {
        self.frequency[0].powi(2) + self.frequency[1].powi(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigEigenfunction {
    pub kind: PolyhedronKind,
    pub sym_type: SymmetryType,
    pub orbit: OrbitIndex,
    /// Terms as functions of the planar net coordinates (after enlargement).
    pub terms: Vec<TrigTerm>,
    /// Terms of the depth-0 function in its own frame.
    pub base_terms: Vec<TrigTerm>,
    pub lambda: f64,
    pub enlargement_depth: u32,
    /// Frame origin of `base_terms`: a vertex for triangles, the face centre for squares.
    pub origin: [f64; 2],
}

/// Checks that `sym_type` and `orbit` give a nonzero function on `kind`.
pub fn admissible(kind: PolyhedronKind, sym_type: SymmetryType, orbit: (i64, i64)) -> Result<(), AnalyticError> {
    let (k, j) = orbit;
    let bad = |msg: &str| Err(AnalyticError::InadmissibleOrbit(format!("{kind} {sym_type} ({k},{j}): {msg}")));
    if !SymmetryType::for_kind(kind).contains(&sym_type) {
        return bad("symmetry type not defined for this solid");
    }
    if !(k >= j && j >= 0) {
        return bad("orbit must satisfy k >= j >= 0");
    }
    let generic = k > j && j > 0;
    match kind.shape() {
        FaceShape::Triangle => {
            if k % 2 != 0 || j % 2 != 0 {
                return bad("k and j must both be even");
            }
            match sym_type {
                SymmetryType::OnePlus | SymmetryType::PP => Ok(()),
                SymmetryType::OneMinus | SymmetryType::MM if !generic => bad("nongeneric orbits have no skew-symmetric function"),
                SymmetryType::PM if !(generic || (j == 0 && k > 0)) => bad("type +- needs a generic orbit or j = 0"),
                SymmetryType::MP if !(generic || (j == k && k > 0)) => bad("type -+ needs a generic orbit or j = k"),
                _ => Ok(()),
            }
        }
        FaceShape::Square => {
            if (k - j) % 2 != 0 {
                return bad("k and j must have the same parity");
            }
            let even = k % 2 == 0;
            match sym_type {
                SymmetryType::PP | SymmetryType::MM if !even => bad("types ++ and -- need even k, j"),
                SymmetryType::PM | SymmetryType::MP if even => bad("types +- and -+ need odd k, j"),
                SymmetryType::MM if !generic => bad("type -- needs a generic orbit"),
                SymmetryType::MP if !generic => bad("type -+ needs a generic orbit"),
                _ => Ok(()),
            }
        }
    }
}

fn terms_from(waveform: Waveform, entries: &[(f64, [f64; 2])]) -> Vec<TrigTerm> {
    entries
        .iter()
        .map(|&(sign, frequency)| TrigTerm {
            sign,
            waveform,
            frequency,
        })
        .collect()
}

fn triangle_terms(sym_type: SymmetryType, k: i64, j: i64) -> Vec<TrigTerm> {
    let w = |a: i64, b: i64| LatticeBasis::HEX.combine(a, b);
    let nongeneric_zero = j == 0;
    let nongeneric_diag = j == k;
    match sym_type {
        SymmetryType::OnePlus | SymmetryType::PP if nongeneric_zero => {
            terms_from(Waveform::Cos, &[(1.0, w(k, 0)), (1.0, w(k, -k)), (1.0, w(0, k))])
        }
        SymmetryType::OnePlus | SymmetryType::PP if nongeneric_diag => {
            terms_from(Waveform::Cos, &[(1.0, w(k, k)), (1.0, w(2 * k, -k)), (1.0, w(k, -2 * k))])
        }
        SymmetryType::OnePlus | SymmetryType::PP | SymmetryType::OneMinus | SymmetryType::MM => {
            let s = if matches!(sym_type, SymmetryType::OnePlus | SymmetryType::PP) { 1.0 } else { -1.0 };
            terms_from(
                Waveform::Cos,
                &[
                    (1.0, w(k, j)),
                    (1.0, w(k + j, -k)),
                    (1.0, w(j, -(k + j))),
                    (s, w(j, k)),
                    (s, w(k + j, -j)),
                    (s, w(k, -(k + j))),
                ],
            )
        }
        SymmetryType::PM if nongeneric_zero => {
            terms_from(Waveform::Sin, &[(1.0, w(k, 0)), (-1.0, w(0, k)), (-1.0, w(k, -k))])
        }
        SymmetryType::MP if nongeneric_diag => {
            terms_from(Waveform::Sin, &[(1.0, w(k, k)), (-1.0, w(2 * k, -k)), (1.0, w(k, -2 * k))])
        }
        SymmetryType::PM | SymmetryType::MP => {
            let signs = if sym_type == SymmetryType::PM {
                [1.0, -1.0, 1.0, -1.0, 1.0, -1.0]
            } else {
                [1.0, 1.0, -1.0, -1.0, 1.0, 1.0]
            };
            let freqs = [w(k, j), w(j, k), w(k + j, -j), w(k + j, -k), w(j, -(j + k)), w(k, -(k + j))];
            let entries: Vec<(f64, [f64; 2])> = signs.iter().cloned().zip(freqs).collect();
            terms_from(Waveform::Sin, &entries)
        }
    }
}

fn square_terms(sym_type: SymmetryType, k: i64, j: i64) -> Vec<TrigTerm> {
    let f = |a: i64, b: i64| [a as f64 / 2.0, b as f64 / 2.0];
    if j == 0 {
        return terms_from(Waveform::Cos, &[(1.0, f(k, 0)), (1.0, f(0, k))]);
    }
    if j == k {
        let s = if sym_type == SymmetryType::PP { 1.0 } else { -1.0 };
        return terms_from(Waveform::Cos, &[(1.0, f(k, k)), (s, f(k, -k))]);
    }
    let signs = match sym_type {
        SymmetryType::PP => [1.0, 1.0, 1.0, 1.0],
        SymmetryType::MM => [1.0, -1.0, -1.0, 1.0],
        SymmetryType::PM => [1.0, 1.0, -1.0, -1.0],
        _ => [1.0, -1.0, 1.0, -1.0],
    };
    let freqs = [f(k, j), f(j, k), f(k, -j), f(j, -k)];
    let entries: Vec<(f64, [f64; 2])> = signs.iter().cloned().zip(freqs).collect();
    terms_from(Waveform::Cos, &entries)
}

/// Closed-form eigenfunction of type `sym_type` on the orbit `(k, j)`.
pub fn build_trig_eigenfunction(
    kind: PolyhedronKind,
    sym_type: SymmetryType,
    orbit: impl Into<OrbitIndex>,
) -> Result<TrigEigenfunction, AnalyticError> {
    let orbit = orbit.into();
    admissible(kind, sym_type, (orbit.k, orbit.j))?;
    let (terms, lambda, origin) = match kind.shape() {
        FaceShape::Triangle => (
            triangle_terms(sym_type, orbit.k, orbit.j),
            4.0 * PI * PI / 3.0 * orbit.norm(kind) as f64,
            [0.0, 0.0],
        ),
        FaceShape::Square => (
            square_terms(sym_type, orbit.k, orbit.j),
            PI * PI * orbit.norm(kind) as f64,
            [0.5, 0.5],
        ),
    };
    Ok(TrigEigenfunction {
        kind,
        sym_type,
        orbit,
        base_terms: terms.clone(),
        terms,
        lambda,
        enlargement_depth: 0,
        origin,
    })
}

/// Folds `p` into the triangle `(0,0), (1/2, 0), (1/2, sqrt(3)/6)`.
fn fold_triangle(p: [f64; 2], bisector: f64, edge: f64) -> ([f64; 2], f64) {
    let h = SQRT3 / 2.0;
    let mut b = p[1] / h;
    let mut a = p[0] - 0.5 * b;
    a -= a.floor();
    b -= b.floor();
    let (mut x, mut y) = (a + 0.5 * b, b * h);
    let mut sign = 1.0;
    for _ in 0..64 {
        if y < 0.0 {
            y = -y;
            sign *= edge;
        } else if y * SQRT3 > x {
            // mirror in the bisector through the origin at 30 degrees
            let (nx, ny) = (0.5 * x + h * y, h * x - 0.5 * y);
            x = nx;
            y = ny;
            sign *= bisector;
        } else if x > 0.5 {
            x = 1.0 - x;
            sign *= bisector;
        } else {
            break;
        }
    }
    ([x, y], sign)
}

/// Folds `p` into the triangle `(0,0), (1/2, 0), (1/2, 1/2)`.
fn fold_square(p: [f64; 2], diagonal: f64, mid: f64) -> ([f64; 2], f64) {
    let (m, n) = (p[0].floor(), p[1].floor());
    let (mut x, mut y) = (p[0] - m, p[1] - n);
    let mut sign = if (m + n).rem_euclid(2.0) == 1.0 { diagonal * mid } else { 1.0 };
    for _ in 0..64 {
        if y < 0.0 {
            y = -y;
            sign *= diagonal;
        } else if x > 0.5 {
            x = 1.0 - x;
            sign *= mid;
        } else if y > x {
            std::mem::swap(&mut x, &mut y);
            sign *= diagonal;
        } else {
            break;
        }
    }
    ([x, y], sign)
}

/// Maps the octahedron onto itself scaled by `sqrt 3`, rotated by -30 degrees
/// about the origin vertex: a half-face lands on a sixth of a face.
pub fn enlargement_map(p: [f64; 2]) -> [f64; 2] {
    let c = SQRT3 / 2.0;
    [(c * p[0] + 0.5 * p[1]) / SQRT3, (-0.5 * p[0] + c * p[1]) / SQRT3]
}

impl TrigEigenfunction {
    /// Normalized eigenvalue (`lambda` over `4 pi^2 / 3` or `pi^2`).
    pub fn normalized_lambda(&self) -> f64 {
        crate::analysis::normalize(self.lambda, self.kind)
    }

    fn base_sum(&self, p: [f64; 2]) -> f64 {
        let q = [p[0] - self.origin[0], p[1] - self.origin[1]];
        self.base_terms.iter().map(|t| t.eval(q)).sum()
    }

    /// Direct evaluation of the planar trigonometric sum, without folding.
    pub fn trig_sum(&self, p: [f64; 2]) -> f64 {
        let p = if self.enlargement_depth > 0 { enlargement_map(p) } else { p };
        self.base_sum(p)
    }

    /// Fold-and-sign evaluation at any point of the plane.
    pub fn evaluate_plane(&self, p: [f64; 2]) -> f64 {
        let p = if self.enlargement_depth > 0 { enlargement_map(p) } else { p };
        let (d, e) = self.sym_type.signs();
        let (q, sign) = match self.kind.shape() {
            FaceShape::Triangle => fold_triangle(p, d, e),
            FaceShape::Square => fold_square(p, d, e),
        };
        sign * self.base_sum(q)
    }

    /// Value at a point of the net.
    pub fn evaluate(&self, p: [f64; 2]) -> Result<f64, AnalyticError> {
        if !shared_net(self.kind).contains(p) {
            return Err(AnalyticError::OutOfDomain(p[0], p[1]));
        }
        Ok(self.evaluate_plane(p))
    }

    /// `+1` if `f(origin - x) = f(origin + x)`, `-1` if skew under that half-turn.
    pub fn half_turn_parity(&self) -> f64 {
        match self.base_terms.first().map(|t| t.waveform) {
            Some(Waveform::Sin) => -1.0,
            _ => 1.0,
        }
    }

    /// Largest absolute coefficient sum, an upper bound for `|f|`.
    pub fn sup_bound(&self) -> f64 {
        self.base_terms.iter().map(|t| t.sign.abs()).sum()
    }
}

/// Octahedron enlargement: `g(p) = f(S p)` with eigenvalue `lambda / 3`.
pub fn enlarge(f: &TrigEigenfunction) -> Result<TrigEigenfunction, AnalyticError> {
    if f.kind != PolyhedronKind::Octahedron {
        return Err(AnalyticError::NotOctahedron);
    }
    if f.enlargement_depth != 0 {
        return Err(AnalyticError::NotOneDimensionalType);
    }
    let c = SQRT3 / 2.0;
    let terms = f
        .base_terms
        .iter()
        .map(|t| {
            // f . (S p) = (S^T f) . p
            let [a, b] = t.frequency;
            TrigTerm {
                frequency: [(c * a - 0.5 * b) / SQRT3, (0.5 * a + c * b) / SQRT3],
                ..*t
            }
        })
        .collect();
    Ok(TrigEigenfunction {
        terms,
        lambda: f.lambda / 3.0,
        enlargement_depth: f.enlargement_depth + 1,
        ..f.clone()
    })
}

/// Every admissible `(type, orbit)` on `kind` with normalized norm at most `nmax`.
pub fn admissible_functions(kind: PolyhedronKind, nmax: i64) -> Vec<TrigEigenfunction> {
    let mut out = Vec::new();
    let bound = ((nmax as f64).sqrt() as i64) + 2;
    for k in 0..=bound {
        for j in 0..=k {
            if OrbitIndex::new(k, j).norm(kind) > nmax {
                continue;
            }
            for &t in SymmetryType::for_kind(kind) {
                if let Ok(f) = build_trig_eigenfunction(kind, t, (k, j)) {
                    out.push(f);
                }
            }
        }
    }
    out
}
