//! Laplacian spectra of the regular tetrahedron, octahedron, icosahedron and cube.
//!
//! The surfaces are flat away from their vertices, so they are handled as
//! planar nets with glued edges. [`mesh`] and [`fem`] discretize a net with
//! linear elements, [`eigen`] solves the resulting pencil, [`analytic`] holds
//! the exact lattice spectra and closed-form eigenfunctions, and [`analysis`]
//! post-processes spectra (normalization, extrapolation, counting functions).

pub mod analysis;
pub mod analytic;
pub mod eigen;
pub mod fem;
pub mod mesh;
pub mod net;

pub use net::{build_net, PolyhedronKind, PolyhedronNet};
