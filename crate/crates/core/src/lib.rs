//! Unary-qubit MaxCut and Ising solvers on a dense statevector simulator.
//!
//! A weighted graph with `n` nodes is mapped to a `1 + 1 + n` qubit circuit
//! (ancilla, cost qubit, working qubits) whose ancilla expectation equals the
//! normalized energy of a product-state ansatz. The ansatz angles are
//! trained with a parameter-shift gradient and a decaying normalized step.
//! A QAOA baseline runs on the same simulator.

pub mod bench;
pub mod circuits;
pub mod error;
pub mod nelder_mead;
pub mod optimize;
pub mod problem;
pub mod seeds;
pub mod statevec;

pub use error::{Error, Result};
