//! Planar nets of the regular polyhedra.
//!
//! Every net is a union of unit faces placed on a regular tiling (the unit
//! triangular tiling for the tetrahedron, octahedron and icosahedron, the
//! unit square grid for the cube). Boundary edges are glued in pairs by
//! isometries; the glued complex is the surface of the solid, with all
//! curvature concentrated at the cone points.
//!
//! Face corners are stored as integer coordinates in the tiling basis so
//! that refinement and vertex identification can be done exactly.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// Height of a unit equilateral triangle.
pub const TRIANGLE_HEIGHT: f64 = 0.866_025_403_784_438_6;

const CONTAINS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("face {face} does not exist (net has {count} faces)")]
    InvalidFace { face: usize, count: usize },
    #[error("face {face} has no edge {edge}")]
    InvalidEdge { face: usize, edge: usize },
    #[error("edge {edge} of face {face} is interior to the net and is not glued")]
    InteriorEdge { face: usize, edge: usize },
    #[error("edge parameter {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("unknown polyhedron `{0}` (expected tetrahedron, octahedron, icosahedron or cube)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolyhedronKind {
    Tetrahedron,
    Octahedron,
    Icosahedron,
    Cube,
}

impl PolyhedronKind {
    pub const ALL: [PolyhedronKind; 4] = [
        PolyhedronKind::Tetrahedron,
        PolyhedronKind::Octahedron,
        PolyhedronKind::Icosahedron,
        PolyhedronKind::Cube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolyhedronKind::Tetrahedron => "tetrahedron",
            PolyhedronKind::Octahedron => "octahedron",
            PolyhedronKind::Icosahedron => "icosahedron",
            PolyhedronKind::Cube => "cube",
        }
    }

    pub fn shape(self) -> FaceShape {
        match self {
            PolyhedronKind::Cube => FaceShape::Square,
            _ => FaceShape::Triangle,
        }
    }

    pub fn face_count(self) -> usize {
        match self {
            PolyhedronKind::Tetrahedron => 4,
            PolyhedronKind::Octahedron => 8,
            PolyhedronKind::Icosahedron => 20,
            PolyhedronKind::Cube => 6,
        }
    }

    pub fn faces_per_vertex(self) -> usize {
        match self {
            PolyhedronKind::Tetrahedron | PolyhedronKind::Cube => 3,
            PolyhedronKind::Octahedron => 4,
            PolyhedronKind::Icosahedron => 5,
        }
    }

    pub fn cone_count(self) -> usize {
        match self {
            PolyhedronKind::Tetrahedron => 4,
            PolyhedronKind::Octahedron => 6,
            PolyhedronKind::Icosahedron => 12,
            PolyhedronKind::Cube => 8,
        }
    }

    /// Total angle around every vertex of the solid.
    pub fn cone_angle(self) -> f64 {
        self.faces_per_vertex() as f64 * self.shape().corner_angle()
    }

    pub fn area(self) -> f64 {
        self.face_count() as f64 * self.shape().face_area()
    }

    /// Base of the one-row strip with the same number of faces: 2, 4, 10, 6.
    ///
    /// Any tree-shaped net with `F` faces has `(w r + 1)(r + 1)` refined grid
    /// points at resolution `r`, where `w` is this width.
    pub fn strip_width(self) -> usize {
        match self.shape() {
            FaceShape::Triangle => self.face_count() / 2,
            FaceShape::Square => self.face_count(),
        }
    }
}

impl fmt::Display for PolyhedronKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolyhedronKind {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tetrahedron" | "tetra" | "tet" => Ok(PolyhedronKind::Tetrahedron),
            "octahedron" | "octa" | "oct" => Ok(PolyhedronKind::Octahedron),
            "icosahedron" | "icosa" | "ico" => Ok(PolyhedronKind::Icosahedron),
            "cube" | "hexahedron" => Ok(PolyhedronKind::Cube),
            _ => Err(NetError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceShape {
    Triangle,
    Square,
}

impl FaceShape {
    pub fn sides(self) -> usize {
        match self {
            FaceShape::Triangle => 3,
            FaceShape::Square => 4,
        }
    }

    pub fn corner_angle(self) -> f64 {
        match self {
            FaceShape::Triangle => PI / 3.0,
            FaceShape::Square => PI / 2.0,
        }
    }

    pub fn face_area(self) -> f64 {
        match self {
            FaceShape::Triangle => 3f64.sqrt() / 4.0,
            FaceShape::Square => 1.0,
        }
    }

    /// Planar position of integer tiling coordinates `(a, b)` scaled by `1/scale`.
    ///
    /// Triangles use the basis `(1, 0)`, `(1/2, sqrt(3)/2)`; squares the
    /// standard basis.
    pub fn to_planar(self, a: i64, b: i64, scale: i64) -> [f64; 2] {
        let s = scale as f64;
        match self {
            FaceShape::Triangle => [(a as f64 + 0.5 * b as f64) / s, b as f64 * TRIANGLE_HEIGHT / s],
            FaceShape::Square => [a as f64 / s, b as f64 / s],
        }
    }

    /// Inverse of [`FaceShape::to_planar`] at unit scale (real-valued).
    pub fn to_lattice(self, p: [f64; 2]) -> [f64; 2] {
        match self {
            FaceShape::Triangle => {
                let b = p[1] / TRIANGLE_HEIGHT;
                [p[0] - 0.5 * b, b]
            }
            FaceShape::Square => p,
        }
    }
}

/// Integer corner position in the tiling basis.
pub type LatticePoint = [i64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Corners in counter-clockwise order, starting at the lowest (then leftmost) one.
    pub corners: Vec<LatticePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlueOrientation {
    /// Parameter `s` on one edge maps to `s` on the other.
    Aligned,
    /// Parameter `s` maps to `1 - s` (orientation-preserving gluing of two ccw faces).
    Reversed,
}

/// Identification of edge `edge_a` of `face_a` with edge `edge_b` of `face_b`.
///
/// Edge `e` of a face runs from corner `e` to corner `e + 1` (mod sides).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeGlue {
    pub face_a: usize,
    pub edge_a: usize,
    pub face_b: usize,
    pub edge_b: usize,
    pub orientation: GlueOrientation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    /// Representative planar position (first corner of the class in face order).
    pub position: [f64; 2],
    pub angle: f64,
    /// Every planar corner position that is glued to this cone point.
    pub copies: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedronNet {
    pub kind: PolyhedronKind,
    pub faces: Vec<Face>,
    pub identifications: Vec<EdgeGlue>,
    pub cone_points: Vec<ConePoint>,
    pub strip_width: usize,
    /// `corner_cone[f][c]` is the cone point index of corner `c` of face `f`.
    corner_cone: Vec<Vec<usize>>,
    /// `(face, edge) -> index into identifications` for boundary edges.
    glue_of: Vec<Vec<Option<usize>>>,
}

type FaceTable = &'static [&'static [LatticePoint]];
type GlueTable = &'static [(usize, usize, usize, usize)];

// Tables produced by unfolding the solids along a spanning tree of faces.
// Face 0 always has its first corner at the origin.

const TETRA_FACES: FaceTable = &[
    &[[0, 0], [1, 0], [0, 1]],
    &[[1, 0], [1, 1], [0, 1]],
    &[[1, 0], [2, 0], [1, 1]],
    &[[2, 0], [2, 1], [1, 1]],
];
const TETRA_GLUES: GlueTable = &[(0, 0, 2, 0), (0, 2, 3, 0), (1, 1, 3, 1)];

const OCTA_FACES: FaceTable = &[
    &[[0, 0], [1, 0], [0, 1]],
    &[[1, 0], [1, 1], [0, 1]],
    &[[1, 0], [2, 0], [1, 1]],
    &[[2, 0], [2, 1], [1, 1]],
    &[[2, 0], [3, 0], [2, 1]],
    &[[3, 0], [3, 1], [2, 1]],
    &[[0, 1], [1, 1], [0, 2]],
    &[[3, -1], [3, 0], [2, 0]],
];
const OCTA_GLUES: GlueTable = &[
    (0, 0, 7, 0),
    (0, 2, 5, 0),
    (2, 0, 7, 2),
    (3, 1, 6, 1),
    (5, 1, 6, 2),
];

const ICOSA_FACES: FaceTable = &[
    &[[0, 0], [1, 0], [0, 1]],
    &[[1, 0], [1, 1], [0, 1]],
    &[[1, 0], [2, 0], [1, 1]],
    &[[2, 0], [2, 1], [1, 1]],
    &[[2, 0], [3, 0], [2, 1]],
    &[[3, 0], [3, 1], [2, 1]],
    &[[3, 0], [4, 0], [3, 1]],
    &[[4, 0], [4, 1], [3, 1]],
    &[[4, 0], [5, 0], [4, 1]],
    &[[5, 0], [5, 1], [4, 1]],
    &[[0, 1], [1, 1], [0, 2]],
    &[[1, 1], [2, 1], [1, 2]],
    &[[2, 1], [3, 1], [2, 2]],
    &[[3, 1], [4, 1], [3, 2]],
    &[[4, 1], [5, 1], [4, 2]],
    &[[1, -1], [1, 0], [0, 0]],
    &[[2, -1], [2, 0], [1, 0]],
    &[[3, -1], [3, 0], [2, 0]],
    &[[4, -1], [4, 0], [3, 0]],
    &[[5, -1], [5, 0], [4, 0]],
];
const ICOSA_GLUES: GlueTable = &[
    (0, 2, 9, 0),
    (10, 1, 11, 2),
    (10, 2, 14, 1),
    (11, 1, 12, 2),
    (12, 1, 13, 2),
    (13, 1, 14, 2),
    (15, 0, 16, 2),
    (15, 2, 19, 0),
    (16, 0, 17, 2),
    (17, 0, 18, 2),
    (18, 0, 19, 2),
];

const CUBE_FACES: FaceTable = &[
    &[[0, 0], [1, 0], [1, 1], [0, 1]],
    &[[1, 0], [2, 0], [2, 1], [1, 1]],
    &[[2, 0], [3, 0], [3, 1], [2, 1]],
    &[[3, 0], [4, 0], [4, 1], [3, 1]],
    &[[0, 1], [1, 1], [1, 2], [0, 2]],
    &[[0, -1], [1, -1], [1, 0], [0, 0]],
];
const CUBE_GLUES: GlueTable = &[
    (0, 3, 3, 1),
    (1, 0, 5, 1),
    (1, 2, 4, 1),
    (2, 0, 5, 0),
    (2, 2, 4, 2),
    (3, 0, 5, 3),
    (3, 2, 4, 3),
];

/// Builds the net of `kind`. Deterministic.
pub fn build_net(kind: PolyhedronKind) -> PolyhedronNet {
    PolyhedronNet::new(kind)
}

/// Process-wide immutable copy of the net of `kind`.
pub fn shared_net(kind: PolyhedronKind) -> &'static PolyhedronNet {
    static NETS: OnceLock<[PolyhedronNet; 4]> = OnceLock::new();
    let nets = NETS.get_or_init(|| PolyhedronKind::ALL.map(build_net));
    &nets[kind as usize]
}

impl PolyhedronNet {
    pub fn new(kind: PolyhedronKind) -> Self {
        let (face_table, glue_table) = match kind {
            PolyhedronKind::Tetrahedron => (TETRA_FACES, TETRA_GLUES),
            PolyhedronKind::Octahedron => (OCTA_FACES, OCTA_GLUES),
            PolyhedronKind::Icosahedron => (ICOSA_FACES, ICOSA_GLUES),
            PolyhedronKind::Cube => (CUBE_FACES, CUBE_GLUES),
        };
        let faces: Vec<Face> = face_table
            .iter()
            .map(|c| Face { corners: c.to_vec() })
            .collect();
        let identifications: Vec<EdgeGlue> = glue_table
            .iter()
            .map(|&(face_a, edge_a, face_b, edge_b)| EdgeGlue {
                face_a,
                edge_a,
                face_b,
                edge_b,
                orientation: GlueOrientation::Reversed,
            })
            .collect();

        let mut glue_of: Vec<Vec<Option<usize>>> =
            faces.iter().map(|f| vec![None; f.corners.len()]).collect();
        for (g, glue) in identifications.iter().enumerate() {
            glue_of[glue.face_a][glue.edge_a] = Some(g);
            glue_of[glue.face_b][glue.edge_b] = Some(g);
        }

        let mut net = PolyhedronNet {
            kind,
            faces,
            identifications,
            cone_points: Vec::new(),
            strip_width: kind.strip_width(),
            corner_cone: Vec::new(),
            glue_of,
        };
        net.classify_corners();
        net
    }

    /// Groups face corners into glued vertex classes and records cone angles.
    fn classify_corners(&mut self) {
        let shape = self.kind.shape();
        let corner_ids: Vec<(usize, usize)> = self
            .faces
            .iter()
            .enumerate()
            .flat_map(|(f, face)| (0..face.corners.len()).map(move |c| (f, c)))
            .collect();
        let index_of = |f: usize, c: usize| -> usize {
            corner_ids.iter().position(|&x| x == (f, c)).expect("corner exists")
        };
        let mut parent: Vec<usize> = (0..corner_ids.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        };
        // Corners at the same planar point are the same point of the net.
        for i in 0..corner_ids.len() {
            for j in (i + 1)..corner_ids.len() {
                let (fi, ci) = corner_ids[i];
                let (fj, cj) = corner_ids[j];
                if self.faces[fi].corners[ci] == self.faces[fj].corners[cj] {
                    union(&mut parent, i, j);
                }
            }
        }
        for glue in &self.identifications {
            let na = self.faces[glue.face_a].corners.len();
            let nb = self.faces[glue.face_b].corners.len();
            let (a0, a1) = (glue.edge_a, (glue.edge_a + 1) % na);
            let (b0, b1) = (glue.edge_b, (glue.edge_b + 1) % nb);
            let pairs = match glue.orientation {
                GlueOrientation::Reversed => [(a0, b1), (a1, b0)],
                GlueOrientation::Aligned => [(a0, b0), (a1, b1)],
            };
            for (ca, cb) in pairs {
                let ia = index_of(glue.face_a, ca);
                let ib = index_of(glue.face_b, cb);
                union(&mut parent, ia, ib);
            }
        }

        let mut class_of_root: Vec<Option<usize>> = vec![None; corner_ids.len()];
        let mut cones: Vec<ConePoint> = Vec::new();
        let mut corner_cone: Vec<Vec<usize>> =
            self.faces.iter().map(|f| vec![0; f.corners.len()]).collect();
        for (i, &(f, c)) in corner_ids.iter().enumerate() {
            let root = find(&mut parent, i);
            let [a, b] = self.faces[f].corners[c];
            let pos = shape.to_planar(a, b, 1);
            let class = match class_of_root[root] {
                Some(k) => k,
                None => {
                    cones.push(ConePoint {
                        position: pos,
                        angle: 0.0,
                        copies: Vec::new(),
                    });
                    class_of_root[root] = Some(cones.len() - 1);
                    cones.len() - 1
                }
            };
            cones[class].angle += shape.corner_angle();
            if !cones[class].copies.iter().any(|q| q == &pos) {
                cones[class].copies.push(pos);
            }
            corner_cone[f][c] = class;
        }
        self.cone_points = cones;
        self.corner_cone = corner_cone;
    }

    pub fn shape(&self) -> FaceShape {
        self.kind.shape()
    }

    pub fn area(&self) -> f64 {
        self.faces.iter().map(|f| self.face_area(f)).sum()
    }

    fn face_area(&self, face: &Face) -> f64 {
        let pts: Vec<[f64; 2]> = (0..face.corners.len())
            .map(|c| self.corner_position_of(face, c))
            .collect();
        let n = pts.len();
        0.5 * (0..n)
            .map(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    }

    fn corner_position_of(&self, face: &Face, corner: usize) -> [f64; 2] {
        let [a, b] = face.corners[corner];
        self.shape().to_planar(a, b, 1)
    }

    pub fn corner_position(&self, face: usize, corner: usize) -> [f64; 2] {
        self.corner_position_of(&self.faces[face], corner)
    }

    /// Cone point index of a face corner.
    pub fn corner_cone(&self, face: usize, corner: usize) -> usize {
        self.corner_cone[face][corner]
    }

    pub fn edge_endpoints(&self, face: usize, edge: usize) -> Result<([f64; 2], [f64; 2]), NetError> {
        self.check_edge(face, edge)?;
        let n = self.faces[face].corners.len();
        Ok((
            self.corner_position(face, edge),
            self.corner_position(face, (edge + 1) % n),
        ))
    }

    /// Planar point at parameter `s` along an edge.
    pub fn edge_point(&self, face: usize, edge: usize, s: f64) -> Result<[f64; 2], NetError> {
        let (p, q) = self.edge_endpoints(face, edge)?;
        Ok([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])])
    }

    fn check_edge(&self, face: usize, edge: usize) -> Result<(), NetError> {
        let f = self.faces.get(face).ok_or(NetError::InvalidFace {
            face,
            count: self.faces.len(),
        })?;
        if edge >= f.corners.len() {
            return Err(NetError::InvalidEdge { face, edge });
        }
        Ok(())
    }

    /// Index into `identifications` for a boundary edge, `None` for interior edges.
    pub fn glue_index(&self, face: usize, edge: usize) -> Result<Option<usize>, NetError> {
        self.check_edge(face, edge)?;
        Ok(self.glue_of[face][edge])
    }

    /// Maps the point at parameter `s` of a glued edge to its partner.
    pub fn glue_map(&self, face: usize, edge: usize, s: f64) -> Result<(usize, usize, f64), NetError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(NetError::ParameterOutOfRange(s));
        }
        let g = self
            .glue_index(face, edge)?
            .ok_or(NetError::InteriorEdge { face, edge })?;
        let glue = &self.identifications[g];
        let (other_face, other_edge) = if glue.face_a == face && glue.edge_a == edge {
            (glue.face_b, glue.edge_b)
        } else {
            (glue.face_a, glue.edge_a)
        };
        let t = match glue.orientation {
            GlueOrientation::Aligned => s,
            GlueOrientation::Reversed => 1.0 - s,
        };
        Ok((other_face, other_edge, t))
    }

    /// Number of distinct edges of the glued complex.
    pub fn glued_edge_count(&self) -> usize {
        let sides: usize = self.faces.iter().map(|f| f.corners.len()).sum();
        let boundary = 2 * self.identifications.len();
        (sides - boundary) / 2 + self.identifications.len()
    }

    /// V - E + F of the glued complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.cone_points.len() as i64 - self.glued_edge_count() as i64 + self.faces.len() as i64
    }

    /// Face whose closed region contains `p` (within 1e-9), lowest index first.
    pub fn face_containing(&self, p: [f64; 2]) -> Option<usize> {
        (0..self.faces.len()).find(|&f| self.face_contains(f, p, CONTAINS_TOL))
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.face_containing(p).is_some()
    }

    pub fn face_contains(&self, face: usize, p: [f64; 2], tol: f64) -> bool {
        let n = self.faces[face].corners.len();
        (0..n).all(|e| {
            let a = self.corner_position(face, e);
            let b = self.corner_position(face, (e + 1) % n);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            // signed distance to the left of a->b (edges have unit length)
            dx * (p[1] - a[1]) - dy * (p[0] - a[0]) >= -tol
        })
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut bb = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for (f, face) in self.faces.iter().enumerate() {
            for c in 0..face.corners.len() {
                let p = self.corner_position(f, c);
                bb[0] = bb[0].min(p[0]);
                bb[1] = bb[1].max(p[0]);
                bb[2] = bb[2].min(p[1]);
                bb[3] = bb[3].max(p[1]);
            }
        }
        bb
    }

    /// Plain-text listing of faces, glues and cone points, one per line.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "net {} faces={} glues={} cones={} strip_width={}",
            self.kind,
            self.faces.len(),
            self.identifications.len(),
            self.cone_points.len(),
            self.strip_width
        );
        for (f, face) in self.faces.iter().enumerate() {
            let pts: Vec<String> = (0..face.corners.len())
                .map(|c| {
                    let p = self.corner_position(f, c);
                    format!("({:.6},{:.6})", p[0], p[1])
                })
                .collect();
            let _ = writeln!(out, "face {} {}", f, pts.join(" "));
        }
        for (g, glue) in self.identifications.iter().enumerate() {
            let orient = match glue.orientation {
                GlueOrientation::Aligned => "aligned",
                GlueOrientation::Reversed => "reversed",
            };
            let _ = writeln!(
                out,
                "glue {} face {} edge {} <-> face {} edge {} {}",
                g, glue.face_a, glue.edge_a, glue.face_b, glue.edge_b, orient
            );
        }
        for (i, cone) in self.cone_points.iter().enumerate() {
            let _ = writeln!(
                out,
                "cone {} ({:.6},{:.6}) angle {:.12} copies {}",
                i,
                cone.position[0],
                cone.position[1],
                cone.angle,
                cone.copies.len()
            );
        }
        out
    }
}
