//! Simulation of a cluster-type spin chain and the causal game it maps to.
//!
//! The crate builds the chain Hamiltonians as Pauli-string sums, solves them
//! either by exact diagonalization or through the free-fermion mapping,
//! evaluates guessing-game success probabilities from process matrices, and
//! ties the two sides together through the `K = (⟨Π⁰⟩ + ⟨Π¹⟩)/2` functional.

pub mod correspondence;
pub mod error;
pub mod fermion;
pub mod game;
pub mod kernel;
pub mod lattice;
pub mod phase;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
