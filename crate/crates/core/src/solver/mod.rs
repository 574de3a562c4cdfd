//! Tied product-state ansatz and the simplex-based ground-state search.

mod ansatz;
mod ground_state;
mod nelder_mead;
mod sweep;

pub use ansatz::{prepare_state, AnsatzParams};
pub use ground_state::{
    minimize_from, named_seeds, optimize_ground_state, random_seeds, verify_against_statevector,
    OptimizationResult, StartLabel,
};
pub use nelder_mead::{nelder_mead, Minimum, OptimizerConfig};
pub use sweep::{cold_start_sweep, sweep, warm_start_sweep, SweepMode};
