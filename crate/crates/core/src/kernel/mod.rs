//! Pauli-string algebra, dense operators and exact diagonalization.

mod dense;
mod pauli;
mod sparse;
mod spectrum;
mod state;

pub use dense::{commutator_norm, dense_cap, to_dense, to_dense_with_cap, DenseOperator, DEFAULT_DENSE_CAP};
pub use pauli::{Axis, OperatorExpr, PauliString, PauliTerm};
pub use sparse::{sparse_ground_state, SPARSE_CAP};
pub use spectrum::{eigensolve, Spectrum, HERMITICITY_TOL};
pub use state::{expectation, reduced_density, Observable, StateVector};
