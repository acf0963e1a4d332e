//! Lattice point counts: the exact spectra of the tetrahedron and the closed-form
//! (nonsingular) parts of the other three spectra.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::net::PolyhedronKind;

use super::trig::SymmetryType;

/// `4 pi^2 / 3`, the eigenvalue of the shortest dual vector on the unit triangle tiling.
pub const HEX_UNIT: f64 = 4.0 * PI * PI / 3.0;

/// Relative slack used when comparing a real `t` against lattice norms.
const COUNT_EPS: f64 = 1e-12;

/// `j^2 + k^2 + j k`.
pub fn loeschian(k: i64, j: i64) -> i64 {
    j * j + k * k + j * k
}

/// Half the number of nonzero `(j, k)` with `j^2 + k^2 + jk = n`; 1 for `n = 0`.
pub fn hexagonal_multiplicity(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let bound = (2.0 * (n as f64).sqrt()).ceil() as i64 + 1;
    let target = n as i64;
    let mut count = 0;
    for j in -bound..=bound {
        for k in -bound..=bound {
            if loeschian(k, j) == target {
                count += 1;
            }
        }
    }
    count / 2
}

/// `#{(j, k) : (4 pi^2 / 3)(j^2 + k^2 + jk) <= t}`.
pub fn torus_count(t: f64) -> u64 {
    if t < 0.0 {
        return 0;
    }
    let nmax = t / HEX_UNIT * (1.0 + COUNT_EPS);
    // j^2 + k^2 + jk >= (3/4) max(|j|, |k|)^2
    let bound = (nmax * 4.0 / 3.0).sqrt().floor() as i64 + 1;
    let mut count = 0;
    for j in -bound..=bound {
        for k in -bound..=bound {
            if (loeschian(k, j) as f64) <= nmax {
                count += 1;
            }
        }
    }
    count
}

/// Exact eigenvalue count of the tetrahedron, `N_T(t) / 2 + 1 / 2`.
pub fn tetra_count_exact(t: f64) -> u64 {
    torus_count(t).div_ceil(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumTag {
    HexLattice,
    SquareLattice,
    Third,
}

impl SpectrumTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumTag::HexLattice => "hexLattice",
            SpectrumTag::SquareLattice => "squareLattice",
            SpectrumTag::Third => "third",
        }
    }
}

impl fmt::Display for SpectrumTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One distinct normalized eigenvalue `numerator / denominator`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumLine {
    pub numerator: u64,
    /// 1, or 3 for values obtained by enlargement.
    pub denominator: u64,
    /// For the tetrahedron: the full multiplicity. Otherwise: the number of
    /// closed-form eigenfunctions of one-dimensional symmetry type at this value.
    pub multiplicity: u64,
    pub tag: SpectrumTag,
    /// A lattice orbit `(k, j)`, `k >= j >= 0`, producing the value (before
    /// division by 3 for `Third` lines).
    pub witness: (i64, i64),
}

impl SpectrumLine {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `"N"` or `"N/3"`.
    pub fn label(&self) -> String {
        if self.denominator == 1 {
            self.numerator.to_string()
        } else {
            format!("{}/{}", self.numerator, self.denominator)
        }
    }
}

/// Orbits `(k, j)` with `k >= j >= 0` and norm at most `nmax`, keyed by norm.
fn orbits(kind: PolyhedronKind, nmax: u64) -> BTreeMap<u64, Vec<(i64, i64)>> {
    let mut out: BTreeMap<u64, Vec<(i64, i64)>> = BTreeMap::new();
    let bound = (nmax as f64).sqrt() as i64 + 2;
    for k in 0..=bound {
        for j in 0..=k {
            let norm = match kind {
                PolyhedronKind::Cube => k * k + j * j,
                _ => loeschian(k, j),
            };
            if norm as u64 > nmax {
                continue;
            }
            let admissible = match kind {
                PolyhedronKind::Tetrahedron => true,
                PolyhedronKind::Octahedron | PolyhedronKind::Icosahedron => k % 2 == 0 && j % 2 == 0,
                PolyhedronKind::Cube => (k - j) % 2 == 0,
            };
            if admissible {
                out.entry(norm as u64).or_default().push((k, j));
            }
        }
    }
    out
}

/// Number of one-dimensional closed-form eigenfunctions on an orbit.
pub fn orbit_function_count(kind: PolyhedronKind, (k, j): (i64, i64)) -> u64 {
    SymmetryType::for_kind(kind)
        .iter()
        .filter(|&&t| super::trig::admissible(kind, t, (k, j)).is_ok())
        .count() as u64
}

/// Closed-form part of the spectrum up to normalized value `nmax`, sorted.
///
/// For the tetrahedron this is the whole spectrum. For the octahedron it
/// includes the values `N / 3` of enlarged eigenfunctions whenever `N / 3` is
/// not an integer (when it is, the enlarged functions lie in the span of the
/// base functions already counted at `N / 3`).
pub fn exact_spectrum(kind: PolyhedronKind, nmax: f64) -> Vec<SpectrumLine> {
    if !(nmax >= 0.0) {
        return Vec::new();
    }
    let lattice_tag = match kind {
        PolyhedronKind::Cube => SpectrumTag::SquareLattice,
        _ => SpectrumTag::HexLattice,
    };
    let int_max = (nmax * (1.0 + COUNT_EPS)).floor() as u64;
    let base_max = if kind == PolyhedronKind::Octahedron {
        (3.0 * nmax * (1.0 + COUNT_EPS)).floor() as u64
    } else {
        int_max
    };
    let mut lines = Vec::new();
    for (norm, orbs) in orbits(kind, base_max) {
        let multiplicity = match kind {
            PolyhedronKind::Tetrahedron => hexagonal_multiplicity(norm),
            _ => orbs.iter().map(|&o| orbit_function_count(kind, o)).sum(),
        };
        if multiplicity == 0 {
            continue;
        }
        if norm <= int_max {
            lines.push(SpectrumLine {
                numerator: norm,
                denominator: 1,
                multiplicity,
                tag: lattice_tag,
                witness: orbs[0],
            });
        }
        if kind == PolyhedronKind::Octahedron && norm % 3 != 0 && norm as f64 / 3.0 <= nmax * (1.0 + COUNT_EPS) {
            lines.push(SpectrumLine {
                numerator: norm,
                denominator: 3,
                multiplicity,
                tag: SpectrumTag::Third,
                witness: orbs[0],
            });
        }
    }
    lines.sort_by(|a, b| a.value().total_cmp(&b.value()));
    lines
}
