//! Normalization, extrapolation across resolutions, eigenvalue counting
//! functions and remainders, and singular/nonsingular classification.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::analytic::{exact_spectrum, hexagonal_multiplicity, loeschian, SpectrumTag, HEX_UNIT};
use crate::net::PolyhedronKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("spectrum covers t < {available} but t = {needed} was requested")]
    InsufficientSpectrum { needed: f64, available: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub const DEFAULT_CLASSIFY_TOL: f64 = 0.02;

/// `4 pi^2 / 3` for triangle faces, `pi^2` for the cube.
pub fn normalization_divisor(kind: PolyhedronKind) -> f64 {
    match kind {
        PolyhedronKind::Cube => PI * PI,
        _ => HEX_UNIT,
    }
}

pub fn normalize(lambda: f64, kind: PolyhedronKind) -> f64 {
    lambda / normalization_divisor(kind)
}

/// Limit of the geometric fit `l(k) = l + A theta^k` through three resolutions.
pub fn aitken_extrapolate(l_r: f64, l_2r: f64, l_4r: f64) -> f64 {
    let d1 = l_2r - l_r;
    let d2 = l_4r - l_2r;
    let den = d2 - d1;
    if den.abs() < 1e-14 * l_4r.abs().max(1.0) {
        return l_4r;
    }
    l_4r - d2 * d2 / den
}

/// Additive constant of the two-term counting asymptotics.
pub fn counting_constant(kind: PolyhedronKind) -> f64 {
    match kind {
        PolyhedronKind::Tetrahedron => 0.5,
        PolyhedronKind::Octahedron => 5.0 / 12.0,
        PolyhedronKind::Icosahedron => 11.0 / 30.0,
        PolyhedronKind::Cube => 7.0 / 18.0,
    }
}

/// `area / (4 pi)` in raw eigenvalue units.
pub fn weyl_slope(kind: PolyhedronKind) -> f64 {
    kind.area() / (4.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    Raw,
    #[default]
    Normalized,
}

impl FromStr for Units {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Units::Raw),
            "normalized" => Ok(Units::Normalized),
            _ => Err(AnalysisError::InvalidArgument(format!("unknown units `{s}`"))),
        }
    }
}

/// Sorted eigenvalues (with multiplicity) and the data of the Weyl prediction.
#[derive(Debug, Clone)]
pub struct CountingSeries {
    pub kind: PolyhedronKind,
    pub units: Units,
    pub eigenvalues: Vec<f64>,
    pub weyl_slope: f64,
    pub c: f64,
    /// Largest `t` at which the count is known to be complete.
    coverage: f64,
    /// Whether the count is complete at `t = coverage` itself.
    inclusive: bool,
    /// `prefix[i]` is the sum of the first `i` eigenvalues.
    prefix: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderRow {
    pub t: f64,
    pub n: u64,
    pub d: f64,
    pub a: f64,
    /// `None` where the series does not reach `t^2`.
    pub g: Option<f64>,
}

impl CountingSeries {
    fn build(kind: PolyhedronKind, units: Units, mut eigenvalues: Vec<f64>, coverage: f64, inclusive: bool) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(eigenvalues.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &v in &eigenvalues {
            acc += v;
            prefix.push(acc);
        }
        let scale = match units {
            Units::Raw => 1.0,
            Units::Normalized => normalization_divisor(kind),
        };
        CountingSeries {
            kind,
            units,
            eigenvalues,
            weyl_slope: weyl_slope(kind) * scale,
            c: counting_constant(kind),
            coverage,
            inclusive,
            prefix,
        }
    }

    /// A truncated numerical spectrum (raw eigenvalues). Complete only below
    /// its top value, since a multiplicity cluster may be cut there.
    pub fn from_raw(kind: PolyhedronKind, raw: &[f64], units: Units) -> Self {
        let values: Vec<f64> = match units {
            Units::Raw => raw.to_vec(),
            Units::Normalized => raw.iter().map(|&l| normalize(l, kind)).collect(),
        };
        let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::build(kind, units, values, top.max(0.0), false)
    }

    /// The exact tetrahedron spectrum through normalized value `nmax`.
    pub fn exact_tetrahedron(nmax: f64, units: Units) -> Self {
        let scale = match units {
            Units::Raw => HEX_UNIT,
            Units::Normalized => 1.0,
        };
        let mut values = Vec::new();
        let bound = (nmax.max(0.0) * 4.0 / 3.0).sqrt() as i64 + 1;
        let mut norms: Vec<u64> = (0..=bound)
            .flat_map(|k| (0..=k).map(move |j| loeschian(k, j)))
            .filter(|&n| n as f64 <= nmax)
            .map(|n| n as u64)
            .collect();
        norms.sort_unstable();
        norms.dedup();
        for n in norms {
            let m = hexagonal_multiplicity(n);
            values.extend(std::iter::repeat_n(n as f64 * scale, m as usize));
        }
        Self::build(PolyhedronKind::Tetrahedron, units, values, nmax.max(0.0) * scale, true)
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn covers(&self, t: f64) -> bool {
        if self.inclusive {
            t <= self.coverage
        } else {
            t < self.coverage
        }
    }

    pub fn count(&self, t: f64) -> u64 {
        counting(self, t)
    }

    fn count_and_sum(&self, t: f64) -> (usize, f64) {
        let cut = t + 1e-12 * t.abs();
        let i = self.eigenvalues.partition_point(|&v| v <= cut);
        (i, self.prefix[i])
    }

    /// `D(t) = N(t) - (slope t + c)`.
    pub fn remainder(&self, t: f64) -> f64 {
        self.count(t) as f64 - (self.weyl_slope * t + self.c)
    }

    /// `A(t) = (1/t) int_0^t D(s) ds`, exactly; `A(0) = D(0)`.
    pub fn average_remainder(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.remainder(0.0);
        }
        let (cnt, sum) = self.count_and_sum(t);
        // int_0^t N = sum over lambda <= t of (t - lambda)
        (cnt as f64 * t - sum) / t - 0.5 * self.weyl_slope * t - self.c
    }

    /// `g(t) = sqrt(t) A(t^2)` when the series reaches `t^2`.
    pub fn rescaled(&self, t: f64) -> Option<f64> {
        let s = t * t;
        self.covers(s).then(|| t.max(0.0).sqrt() * self.average_remainder(s))
    }
}

/// `#{lambda_j <= t}`, counting the zero eigenvalue.
pub fn counting(series: &CountingSeries, t: f64) -> u64 {
    series.count_and_sum(t).0 as u64
}

/// Rows `(t, N, D, A, g)` at `samples` equally spaced `t` in `[0, tmax]`.
pub fn remainder_series(series: &CountingSeries, tmax: f64, samples: usize) -> Result<Vec<RemainderRow>, AnalysisError> {
    if !(tmax > 0.0) || samples < 2 {
        return Err(AnalysisError::InvalidArgument(format!(
            "need tmax > 0 and samples >= 2, got {tmax} and {samples}"
        )));
    }
    if !series.covers(tmax) {
        return Err(AnalysisError::InsufficientSpectrum {
            needed: tmax,
            available: series.coverage(),
        });
    }
    Ok((0..samples)
        .map(|i| {
            let t = if i + 1 == samples {
                tmax
            } else {
                tmax * i as f64 / (samples - 1) as f64
            };
            remainder_row(series, t)
        })
        .collect())
}

/// One row `(t, N, D, A, g)` without a coverage check.
pub fn remainder_row(series: &CountingSeries, t: f64) -> RemainderRow {
    RemainderRow {
        t,
        n: series.count(t),
        d: series.remainder(t),
        a: series.average_remainder(t),
        g: series.rescaled(t),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Nonsingular {
        /// The exact normalized value.
        value: f64,
        /// `"N"` or `"N/3"`.
        label: String,
        witness: (i64, i64),
        third: bool,
    },
    Singular,
}

impl Classification {
    pub fn is_nonsingular(&self) -> bool {
        matches!(self, Classification::Nonsingular { .. })
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Classification::Nonsingular { .. } => "nonsingular",
            Classification::Singular => "singular",
        }
    }

    /// `N (k;j)`, with a `third` suffix for enlarged values; empty when singular.
    pub fn witness_label(&self) -> String {
        match self {
            Classification::Nonsingular {
                label, witness, third, ..
            } => {
                let suffix = if *third { " third" } else { "" };
                format!("{label} ({};{}){suffix}", witness.0, witness.1)
            }
            Classification::Singular => String::new(),
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Singular => f.write_str("singular"),
            _ => write!(f, "nonsingular {}", self.witness_label()),
        }
    }
}

/// Nonsingular when `normalized` lies within `tol` (absolute) of a value of
/// the closed-form spectrum of `kind`. A numerical identification only.
pub fn classify(normalized: f64, kind: PolyhedronKind, tol: f64) -> Classification {
    if !normalized.is_finite() || !(tol > 0.0) {
        return Classification::Singular;
    }
    exact_spectrum(kind, (normalized + tol).max(0.0))
        .into_iter()
        .map(|line| ((line.value() - normalized).abs(), line))
        .filter(|(dist, _)| *dist <= tol)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, line)| Classification::Nonsingular {
            value: line.value(),
            label: line.label(),
            witness: line.witness,
            third: line.tag == SpectrumTag::Third,
        })
        .unwrap_or(Classification::Singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::tetra_count_exact;
    use proptest::prelude::*;

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize(0.0, PolyhedronKind::Icosahedron), 0.0);
        assert!((normalize(HEX_UNIT * 7.0, PolyhedronKind::Tetrahedron) - 7.0).abs() < 1e-14);
        assert!((normalize(PI * PI * 2.0, PolyhedronKind::Cube) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn aitken_examples() {
        assert_eq!(aitken_extrapolate(2.5, 2.5, 2.5), 2.5);
        assert!((aitken_extrapolate(1.4, 1.2, 1.1) - 1.0).abs() < 1e-12);
        // ratio 1/4, as for a second order method under mesh halving
        let l = |k: i32| 3.0 + 0.8 * 0.25f64.powi(k);
        assert!((aitken_extrapolate(l(0), l(1), l(2)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_slopes() {
        let s3 = 3f64.sqrt();
        let want = [s3 / (4.0 * PI), s3 / (2.0 * PI), 5.0 * s3 / (4.0 * PI), 3.0 / (2.0 * PI)];
        for (kind, w) in PolyhedronKind::ALL.into_iter().zip(want) {
            assert!((weyl_slope(kind) - w).abs() < 1e-12);
        }
        let s = CountingSeries::exact_tetrahedron(1.0, Units::Normalized);
        assert!((s.weyl_slope - PI / s3).abs() < 1e-12);
    }

    #[test]
    fn tetra_counts() {
        let raw = CountingSeries::exact_tetrahedron(200.0, Units::Raw);
        assert_eq!(raw.count(0.5), 1);
        assert_eq!(raw.count(HEX_UNIT), 4);
        let norm = CountingSeries::exact_tetrahedron(200.0, Units::Normalized);
        assert_eq!(norm.count(1.0), 4);
        assert_eq!(norm.count(0.999), 1);
        assert!((norm.remainder(0.0) - 0.5).abs() < 1e-15);
        assert!((norm.average_remainder(0.0) - 0.5).abs() < 1e-15);
    }

    /// Integral of `D` over `[0, t]` by two-point Gauss on each interval between breakpoints.
    fn quadrature_average(s: &CountingSeries, t: f64) -> f64 {
        let mut pts: Vec<f64> = vec![0.0];
        pts.extend(s.eigenvalues.iter().cloned().filter(|&v| v > 0.0 && v < t));
        pts.push(t);
        pts.dedup();
        let brute = |x: f64| s.eigenvalues.iter().filter(|&&v| v <= x).count() as f64 - (s.weyl_slope * x + s.c);
        let g = 0.5 / 3f64.sqrt();
        let mut total = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (m, h) = (0.5 * (a + b), b - a);
            total += 0.5 * h * (brute(m - g * h) + brute(m + g * h));
        }
        total / t
    }

    #[test]
    fn exact_average_matches_quadrature() {
        let s = CountingSeries::exact_tetrahedron(300.0, Units::Normalized);
        for t in [0.3, 1.0, 2.5, 17.2, 99.9, 250.0, 300.0] {
            let (a, q) = (s.average_remainder(t), quadrature_average(&s, t));
            assert!((a - q).abs() < 1e-9, "{t}: {a} vs {q}");
        }
    }

    #[test]
    fn series_rows_and_coverage() {
        let s = CountingSeries::exact_tetrahedron(100.0, Units::Normalized);
        let rows = remainder_series(&s, 20.0, 5).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].t, 0.0);
        assert_eq!(rows[4].t, 20.0);
        assert!(rows[2].g.is_some() && rows[4].g.is_none());
        assert!(matches!(
            remainder_series(&s, 101.0, 3),
            Err(AnalysisError::InsufficientSpectrum { .. })
        ));
        assert!(remainder_series(&s, 10.0, 1).is_err());
        let fem = CountingSeries::from_raw(PolyhedronKind::Cube, &[0.0, 5.0, 5.0, 9.0], Units::Raw);
        assert!(fem.covers(8.9) && !fem.covers(9.0));
    }

    #[test]
    fn slope_of_exact_counts() {
        let s = CountingSeries::exact_tetrahedron(2000.0, Units::Normalized);
        let ts: Vec<f64> = (0..=380).map(|i| 100.0 + 5.0 * i as f64).collect();
        let ns: Vec<f64> = ts.iter().map(|&t| s.count(t) as f64).collect();
        let mt = ts.iter().sum::<f64>() / ts.len() as f64;
        let mn = ns.iter().sum::<f64>() / ns.len() as f64;
        let cov: f64 = ts.iter().zip(&ns).map(|(t, n)| (t - mt) * (n - mn)).sum();
        let var: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
        let want = 3f64.sqrt() / (4.0 * PI) * HEX_UNIT;
        assert!((cov / var / want - 1.0).abs() < 0.02);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(8.06, PolyhedronKind::Cube, 0.02), Classification::Singular);
        match classify(8.004, PolyhedronKind::Cube, 0.02) {
            Classification::Nonsingular { label, witness, third, .. } => {
                assert_eq!((label.as_str(), witness, third), ("8", (2, 2), false));
            }
            other => panic!("{other:?}"),
        }
        match classify(1.3334, PolyhedronKind::Octahedron, 0.02) {
            Classification::Nonsingular { label, third, .. } => {
                assert_eq!(label, "4/3");
                assert!(third);
            }
            other => panic!("{other:?}"),
        }
        assert!(classify(9.33771, PolyhedronKind::Octahedron, 0.02).is_nonsingular());
        assert!(!classify(9.18907, PolyhedronKind::Octahedron, 0.02).is_nonsingular());
        assert!(!classify(0.42105, PolyhedronKind::Cube, 0.02).is_nonsingular());
    }

    proptest! {
        #[test]
        fn counting_matches_the_torus_oracle(t in 0.0f64..(HEX_UNIT * 200.0)) {
            let s = CountingSeries::exact_tetrahedron(200.0, Units::Raw);
            prop_assert_eq!(s.count(t), tetra_count_exact(t));
        }

        #[test]
        fn classify_is_monotone_in_tol(x in 0.0f64..40.0, tol in 0.001f64..0.2, k in 0usize..4) {
            let kind = PolyhedronKind::ALL[k];
            if classify(x, kind, tol).is_nonsingular() {
                prop_assert!(classify(x, kind, tol * 1.5).is_nonsingular());
            }
        }

        #[test]
        fn average_is_continuous(t in 0.5f64..150.0) {
            let s = CountingSeries::exact_tetrahedron(200.0, Units::Normalized);
            let h = 1e-7;
            prop_assert!((s.average_remainder(t + h) - s.average_remainder(t)).abs() < 1e-4);
        }

        #[test]
        fn remainder_drops_linearly_between_eigenvalues(t in 0.1f64..150.0) {
            let s = CountingSeries::exact_tetrahedron(200.0, Units::Normalized);
            let next = s.eigenvalues.iter().cloned().find(|&v| v > t).unwrap();
            let u = t + 0.5 * (next - t);
            let drop = s.remainder(t) - s.remainder(u);
            prop_assert!((drop - s.weyl_slope * (u - t)).abs() < 1e-9);
        }
    }
}
