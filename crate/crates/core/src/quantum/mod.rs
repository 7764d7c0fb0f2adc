//! States, operators, density matrices and the Lindblad master equation.

mod bloch;
mod density;
mod environment;
mod lindblad;
mod operator;
mod state;

pub use bloch::{bloch_to_state, bloch_vector, state_to_bloch, BlochPoint, POLE_SIN_TOL};
pub use density::{DensityMatrix, DENSITY_EIGEN_FLOOR, DENSITY_HERMITIAN_TOL, DENSITY_TRACE_TOL};
pub use environment::{
    make_environment, qubit_hamiltonian, Couplings, EnvironmentKind, EnvironmentModel,
};
pub use lindblad::{
    lindblad_evolve, lindblad_evolve_recorded, lindblad_rhs, LindbladSeries, TRACE_RENORM_TOL,
};
pub use operator::{OperatorMatrix, HERMITIAN_TOL};
pub use state::{expectation, QuantumState, NORMALIZATION_TOL};

pub(crate) use state::raw_expectation;
