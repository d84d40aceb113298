//! Exact diagonalization of the anisotropic Dicke model
//!
//! H = ω a†a + ω0 Jz + g1/√(2j)(a†J− + aJ+) + g2/√(2j)(a†J+ + aJ−)
//!
//! in a truncated Fock ⊗ Dicke basis, with the eigenstate, spectral,
//! quench and thermal diagnostics used to map its ground-state, excited-state,
//! ergodicity and thermal transitions.

pub mod bands;
pub mod basis;
pub mod dynamics;
pub mod eigensolve;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod observables;
pub mod sweep;
pub mod thermal;

pub use basis::{Basis, BasisState, ModelParams, Parity};
pub use eigensolve::{eigh, eigvalsh, ResolvedSpectrum, Spectrum};
pub use error::{Error, Result};
pub use hamiltonian::{SparseSymmetric, SymmetricMatrix};
pub use model::DickeSystem;
