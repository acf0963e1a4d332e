//! Uniform refinement of a net and the degree-of-freedom map across glued edges.

use std::collections::HashMap;

use thiserror::Error;

use crate::net::{FaceShape, LatticePoint, PolyhedronKind, PolyhedronNet};

const LOCATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("resolution must be at least 1")]
    ZeroResolution,
    #[error("point ({0}, {1}) lies outside the net")]
    OutOfDomain(f64, f64),
    #[error("vector has length {got}, mesh has {expected} degrees of freedom")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub net: PolyhedronNet,
    /// Subintervals per unit edge.
    pub resolution: usize,
    pub planar_vertices: Vec<[f64; 2]>,
    /// Grid coordinates of each planar vertex, in the tiling basis scaled by `resolution`.
    pub lattice: Vec<LatticePoint>,
    pub dof_of: Vec<usize>,
    /// Counter-clockwise triples of planar vertex indices.
    pub elements: Vec<[usize; 3]>,
    pub element_face: Vec<usize>,
    pub dof_count: usize,
    pub planar_count: usize,
    /// Lowest planar vertex index carrying each DOF.
    pub dof_representative: Vec<usize>,
    // face_cells[f][2 * (j * r + i) + upper] -> element index
    face_cells: Vec<Vec<usize>>,
}

/// Point location result: element index and barycentric weights of its three vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub element: usize,
    pub barycentric: [f64; 3],
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so numbering follows planar order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn lerp_key(a: LatticePoint, b: LatticePoint, r: i64, t: i64) -> LatticePoint {
    [a[0] * r + t * (b[0] - a[0]), a[1] * r + t * (b[1] - a[1])]
}

/// Local grid point `(i, j)` of a face: `r A + i (B - A) + j (last - A)`.
fn face_grid_key(corners: &[LatticePoint], r: i64, i: i64, j: i64) -> LatticePoint {
    let a = corners[0];
    let b = corners[1];
    let c = corners[corners.len() - 1];
    [
        a[0] * r + i * (b[0] - a[0]) + j * (c[0] - a[0]),
        a[1] * r + i * (b[1] - a[1]) + j * (c[1] - a[1]),
    ]
}

/// For square faces: whether cells are split along the lower-left to
/// upper-right diagonal. The split diagonals of all faces form the edges of a
/// regular tetrahedron inscribed in the cube, so the triangulation keeps the
/// rotations of that tetrahedron as symmetries.
fn diagonal_directions(net: &PolyhedronNet) -> Vec<bool> {
    if net.shape() != FaceShape::Square {
        return vec![false; net.faces.len()];
    }
    // two-colour the cube vertices along face edges
    let mut colour: Vec<Option<bool>> = vec![None; net.cone_points.len()];
    colour[0] = Some(true);
    let mut changed = true;
    while changed {
        changed = false;
        for f in 0..net.faces.len() {
            for c in 0..4 {
                let (a, b) = (net.corner_cone(f, c), net.corner_cone(f, (c + 1) % 4));
                if let (Some(x), None) = (colour[a], colour[b]) {
                    colour[b] = Some(!x);
                    changed = true;
                } else if let (None, Some(y)) = (colour[a], colour[b]) {
                    colour[a] = Some(!y);
                    changed = true;
                }
            }
        }
    }
    (0..net.faces.len())
        .map(|f| colour[net.corner_cone(f, 0)] == Some(true))
        .collect()
}

/// Grid points of the planar net at resolution `r`, before identification.
pub fn planar_count(kind: PolyhedronKind, r: usize) -> usize {
    (kind.strip_width() * r + 1) * (r + 1)
}

/// Vertices of the glued surface: `2 + elements / 2`.
pub fn dof_count(kind: PolyhedronKind, r: usize) -> usize {
    let triangles = match kind.shape() {
        FaceShape::Triangle => kind.face_count() * r * r,
        FaceShape::Square => 2 * kind.face_count() * r * r,
    };
    2 + triangles / 2
}

pub fn build_mesh(net: &PolyhedronNet, r: usize) -> Result<SurfaceMesh, MeshError> {
    if r == 0 {
        return Err(MeshError::ZeroResolution);
    }
    let shape = net.shape();
    let ri = r as i64;

    // collect every face grid point
    let mut keys: Vec<LatticePoint> = Vec::new();
    for face in &net.faces {
        for j in 0..=ri {
            let imax = match shape {
                FaceShape::Triangle => ri - j,
                FaceShape::Square => ri,
            };
            for i in 0..=imax {
                keys.push(face_grid_key(&face.corners, ri, i, j));
            }
        }
    }
    // rows bottom to top, then left to right (2a + b orders x within a triangle row)
    keys.sort_by_key(|&[a, b]| match shape {
        FaceShape::Triangle => (b, 2 * a + b),
        FaceShape::Square => (b, a),
    });
    keys.dedup();
    let index: HashMap<LatticePoint, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let planar_vertices: Vec<[f64; 2]> = keys.iter().map(|&[a, b]| shape.to_planar(a, b, ri)).collect();

    let rising = diagonal_directions(net);
    let mut elements = Vec::new();
    let mut element_face = Vec::new();
    let mut face_cells = Vec::with_capacity(net.faces.len());
    for (f, face) in net.faces.iter().enumerate() {
        let mut cells = vec![usize::MAX; 2 * r * r];
        let v = |i: i64, j: i64| index[&face_grid_key(&face.corners, ri, i, j)];
        for j in 0..ri {
            for i in 0..ri {
                let cell = 2 * (j as usize * r + i as usize);
                match shape {
                    FaceShape::Triangle => {
                        if i + j < ri {
                            cells[cell] = elements.len();
                            elements.push([v(i, j), v(i + 1, j), v(i, j + 1)]);
                            element_face.push(f);
                        }
                        if i + j <= ri - 2 {
                            cells[cell + 1] = elements.len();
                            elements.push([v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]);
                            element_face.push(f);
                        }
                    }
                    FaceShape::Square => {
                        let tris = if rising[f] {
                            [[v(i, j), v(i + 1, j), v(i + 1, j + 1)], [v(i, j), v(i + 1, j + 1), v(i, j + 1)]]
                        } else {
                            [[v(i, j), v(i + 1, j), v(i, j + 1)], [v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]]
                        };
                        for (t, tri) in tris.into_iter().enumerate() {
                            cells[cell + t] = elements.len();
                            elements.push(tri);
                            element_face.push(f);
                        }
                    }
                }
            }
        }
        face_cells.push(cells);
    }

    let mut uf = UnionFind::new(keys.len());
    for glue in &net.identifications {
        let fa = &net.faces[glue.face_a].corners;
        let fb = &net.faces[glue.face_b].corners;
        let (a0, a1) = (fa[glue.edge_a], fa[(glue.edge_a + 1) % fa.len()]);
        let (b0, b1) = (fb[glue.edge_b], fb[(glue.edge_b + 1) % fb.len()]);
        for t in 0..=ri {
            let ta = index[&lerp_key(a0, a1, ri, t)];
            let s = match glue.orientation {
                crate::net::GlueOrientation::Reversed => ri - t,
                crate::net::GlueOrientation::Aligned => t,
            };
            let tb = index[&lerp_key(b0, b1, ri, s)];
            uf.union(ta, tb);
        }
    }
    let mut dof_of = vec![usize::MAX; keys.len()];
    let mut dof_representative = Vec::new();
    for p in 0..keys.len() {
        let root = uf.find(p);
        if dof_of[root] == usize::MAX {
            dof_of[root] = dof_representative.len();
            dof_representative.push(root);
        }
        dof_of[p] = dof_of[root];
    }

    Ok(SurfaceMesh {
        net: net.clone(),
        resolution: r,
        planar_count: keys.len(),
        dof_count: dof_representative.len(),
        planar_vertices,
        lattice: keys,
        dof_of,
        elements,
        element_face,
        dof_representative,
        face_cells,
    })
}

fn signed_area(p: [f64; 2], q: [f64; 2], s: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (s[1] - p[1]) - (s[0] - p[0]) * (q[1] - p[1]))
}

impl SurfaceMesh {
    pub fn element_vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.elements[e];
        [self.planar_vertices[a], self.planar_vertices[b], self.planar_vertices[c]]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    pub fn element_dofs(&self, e: usize) -> [usize; 3] {
        let [a, b, c] = self.elements[e];
        [self.dof_of[a], self.dof_of[b], self.dof_of[c]]
    }

    pub fn barycentric(&self, e: usize, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.element_vertices(e);
        let area = signed_area(a, b, c);
        [
            signed_area(p, b, c) / area,
            signed_area(a, p, c) / area,
            signed_area(a, b, p) / area,
        ]
    }

    /// Finds an element containing `p`, preferring the one where `p` is most interior.
    pub fn locate(&self, p: [f64; 2]) -> Result<Location, MeshError> {
        let shape = self.net.shape();
        let r = self.resolution;
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for f in 0..self.net.faces.len() {
            if !self.net.face_contains(f, p, LOCATE_TOL) {
                continue;
            }
            let a = self.net.corner_position(f, 0);
            let b = self.net.corner_position(f, 1);
            let c = self.net.corner_position(f, self.net.faces[f].corners.len() - 1);
            let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
            let det = e1[0] * e2[1] - e1[1] * e2[0];
            let (dx, dy) = (p[0] - a[0], p[1] - a[1]);
            let u = (dx * e2[1] - dy * e2[0]) / det * r as f64;
            let v = (e1[0] * dy - e1[1] * dx) / det * r as f64;
            let i = (u.floor().max(0.0) as usize).min(r - 1);
            let j = (v.floor().max(0.0) as usize).min(r - 1);
            let mut candidates = Vec::with_capacity(4);
            for (ci, cj) in [(i, j), (i.saturating_sub(1), j), (i, j.saturating_sub(1))] {
                let cell = 2 * (cj * r + ci);
                for e in [self.face_cells[f][cell], self.face_cells[f][cell + 1]] {
                    if e != usize::MAX {
                        candidates.push(e);
                    }
                }
            }
            if shape == FaceShape::Triangle && i + j >= r {
                // outside the face by rounding; fall back to the diagonal cells
                let ii = r - 1 - j.min(r - 1);
                candidates.push(self.face_cells[f][2 * (j.min(r - 1) * r + ii)]);
            }
            for e in candidates {
                let bc = self.barycentric(e, p);
                let score = bc.iter().cloned().fold(f64::INFINITY, f64::min);
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, e, bc));
                }
            }
        }
        match best {
            Some((score, e, bc)) if score >= -1e-6 => {
                let clamped = bc.map(|x| x.max(0.0));
                let sum: f64 = clamped.iter().sum();
                Ok(Location {
                    element: e,
                    barycentric: clamped.map(|x| x / sum),
                })
            }
            _ => Err(MeshError::OutOfDomain(p[0], p[1])),
        }
    }

    /// P1 interpolation of a DOF vector at a planar point.
    pub fn interpolate(&self, values: &[f64], p: [f64; 2]) -> Result<f64, MeshError> {
        if values.len() != self.dof_count {
            return Err(MeshError::DimensionMismatch {
                expected: self.dof_count,
                got: values.len(),
            });
        }
        let loc = self.locate(p)?;
        let dofs = self.element_dofs(loc.element);
        Ok((0..3).map(|k| loc.barycentric[k] * values[dofs[k]]).sum())
    }

    /// Samples `f` at one planar representative of every DOF.
    pub fn sample<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Vec<f64> {
        self.dof_representative
            .iter()
            .map(|&p| f(self.planar_vertices[p]))
            .collect()
    }
}
