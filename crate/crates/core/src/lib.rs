//! Entanglement entropy of degenerate ferromagnetic ground states built as
//! linear combinations of coherent states supported on fractals.
//!
//! The crate covers spin-s SU(2), the SO(4) spin-orbital model and SU(2s+1)
//! chains. Ground states are expanded in the orthonormal basis generated by
//! lowering the highest weight state; every such basis state has an exact
//! Schmidt decomposition, so the reduced density matrix of an n-site block
//! never requires the full Hilbert space.
//!
//! Layout:
//! - [`numerics`]: signed-log arithmetic, Hermitian eigensolvers, line fits.
//! - [`fractal`]: Cantor sets, teepees and product fractals.
//! - [`coefficients`]: coefficient profiles and zero injection.
//! - [`phase`]: phase-sum kernels shared by the assembly routines.
//! - [`su2`] and [`sun`]: Schmidt coefficients, coherent states, assembly.
//! - [`entanglement`]: reduced density matrices, entropy profiles, fits.
//! - [`oracle`]: brute-force dense reference for small systems.
//! - [`experiment`]: configs, figure presets and output bundles.

pub mod coefficients;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod fractal;
pub mod numerics;
pub mod oracle;
pub mod phase;
pub mod su2;
pub mod sun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
