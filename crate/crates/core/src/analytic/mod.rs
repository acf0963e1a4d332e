//! Closed-form spectra and eigenfunctions.

pub mod lattice;
pub mod trig;

pub use lattice::{
    exact_spectrum, hexagonal_multiplicity, loeschian, orbit_function_count, tetra_count_exact, torus_count,
    SpectrumLine, SpectrumTag, HEX_UNIT,
};
pub use trig::{
    admissible, admissible_functions, build_trig_eigenfunction, enlarge, enlargement_map, AnalyticError,
    LatticeBasis, OrbitIndex, SymmetryType, TrigEigenfunction, TrigTerm, Waveform,
};
