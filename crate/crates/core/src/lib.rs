//! Quantum-circuit simulation of ultra-weak magnetocrystalline anisotropy in
//! a four-site frustrated spin-1/2 antiferromagnet.
//!
//! Each spin site uses a system qubit plus a tied ancilla, so quadratic
//! anisotropy terms survive the Pauli encoding. The crate provides the
//! statevector engine ([`engine`]), the Hamiltonian and its closed-form
//! energy ([`model`]), the tied-ansatz simplex solver ([`solver`]),
//! magnetization/torque/phase analysis ([`observables`]), independent
//! verification routines ([`oracle`]) and the command-line runner ([`cli`]).
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision instantiation used everywhere else.

pub mod cli;
pub mod engine;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type StateVector = engine::StateVector<f64>;
pub type WeightedPauliSum = engine::WeightedPauliSum<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type FieldSpec = model::FieldSpec<f64>;
pub type FieldPlane = model::FieldPlane<f64>;
pub type EnergyBreakdown = model::EnergyBreakdown<f64>;
pub type AnsatzParams = solver::AnsatzParams<f64>;
pub type OptimizerConfig = solver::OptimizerConfig<f64>;
pub type OptimizationResult = solver::OptimizationResult<f64>;

pub type StateVector32 = engine::StateVector<f32>;
pub type ModelParams32 = model::ModelParams<f32>;
pub type FieldSpec32 = model::FieldSpec<f32>;
pub type AnsatzParams32 = solver::AnsatzParams<f32>;
