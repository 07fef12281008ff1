//! Zitterbewegung (ZB) center-of-mass dynamics and topological invariants for
//! spin-J Dirac Hamiltonians and lattice band models.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] and [`spectral`]: small dense complex matrices, Hermitian
//!   eigendecomposition with degenerate-level projectors, unitary evolution.
//! * [`spin`]: spin-J matrices, Pauli and Gell-Mann generators.
//! * [`model`]: Bloch and continuum Hamiltonians built from generator sets.
//! * [`dynamics`]: exact and closed-form ZB trajectories, Gaussian packets,
//!   rotation sense and frequency content.
//! * [`topology`]: local indices at high-symmetry points, Chern numbers,
//!   3D winding numbers and the Kane-Mele Z2 invariant.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod spin;
pub mod topology;

pub use error::{Result, ZbError};
pub use linalg::{CMatrix, C64};
pub use model::{BlochModel, Hsp, KaneMeleParams, ModelKind, SpinSector, Spinor};
pub use spectral::{evolve, hermitian_eig, HermitianMatrix, SpectralDecomposition};
pub use spin::{GeneratorSet, Spin, SpinBasis};
