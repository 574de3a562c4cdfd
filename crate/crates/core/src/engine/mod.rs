//! Dense statevector engine: basis-state preparation, single-qubit rotations,
//! and exact or shot-sampled expectations of real-weighted Pauli sums.
//!
//! Pauli strings are applied by bit manipulation on amplitude indices; no
//! operator matrix is ever materialized here.

mod pauli;
mod sampling;
mod state;

pub use pauli::{Pauli, PauliString, WeightedPauliSum, MAX_QUBITS};
pub use sampling::{sample_expectation, sample_term_means, shot_sigma};
pub use state::StateVector;
