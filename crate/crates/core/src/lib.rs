//! Stochastic Hamiltonian-simulation protocols at desk scale.
//!
//! The crate implements and cross-validates four routes to the
//! Heisenberg-picture expectation <psi|U†(t) Q U(t)|psi> for grouped-term
//! Hamiltonians H = Σ_i h_i H_i:
//!
//! - exact evolution by spectral decomposition ([`exact`]),
//! - first/second-order Trotter product formulas with folding
//!   ([`trotter`]),
//! - the fixed-distribution randomized compiler qDRIFT ([`qdrift`]),
//! - the adaptive quasi-probability protocol qSHIFT ([`qshift`]), whose
//!   per-round sampling distributions are solved from a linear system
//!   over nested-commutator index words ([`words`]).
//!
//! [`stats`] adds power-law fitting and the variance/complexity formulas;
//! [`experiment`] wires everything into config-driven sweeps with CSV/JSON
//! output for the `sim` binary.

pub mod config;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod hamiltonian;
pub mod linalg;
pub mod measure;
pub mod pauli;
pub mod policy;
pub mod qdrift;
pub mod qshift;
pub mod stats;
pub mod taylor;
pub mod trotter;
pub mod words;

pub use error::{Error, Result};
