//! Quantum state diffusion and the Riemannian geometry of its diffusion metric.
//!
//! Qubit basis: index 0 is the excited state, index 1 the ground state.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod quantum;
pub mod serde_complex;
pub mod verify;

pub use error::{Error, Result};
pub use quantum::{
    bloch_to_state, expectation, lindblad_evolve, lindblad_rhs, make_environment, state_to_bloch,
    BlochPoint, Couplings, DensityMatrix, EnvironmentKind, EnvironmentModel, OperatorMatrix,
    QuantumState,
};
