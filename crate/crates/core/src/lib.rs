//! Simulation of SSH-like dimerized spin chains in the single-excitation
//! subspace.
//!
//! Two symmetric chain families are supported: site 0 weakly coupled
//! ([`Family::WeakCenter`]) and site 0 strongly coupled
//! ([`Family::StrongCenter`]). The crate builds their tridiagonal
//! Hamiltonians, diagonalizes them, averages over diagonal disorder,
//! propagates single excitations and classifies the dimer configurations
//! topologically.

// negated float comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod config;
pub mod disorder;
pub mod dynamics;
pub mod eigen;
mod error;
pub mod output;
pub mod run;
pub mod spectral;
pub mod topology;

pub use chain::{build_couplings, build_hamiltonian, mirror_reflect, ChainSpec, Couplings, Family, Hamiltonian};
pub use error::{Error, ErrorKind, Result};
pub use spectral::{eigendecompose, Spectrum};
