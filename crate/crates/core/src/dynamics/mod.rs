//! The QSD stochastic differential equation and its sample paths.

mod ensemble;
mod gradient;
mod kernel;
mod noise;
mod real;
mod sde;

pub use ensemble::{ensemble_density, run_indexed, EnsembleDensity};
pub use gradient::{hermitian_gradient_check, GradientReport};
pub use noise::{sample_wiener, trajectory_rng, NoiseIncrement};
pub use real::{
    complex_to_real, from_real, real_diffusion_block, real_drift_diffusion, real_to_complex,
    to_real, RealStateVector,
};
pub use sde::{
    diffusion_columns, drift, em_step, em_step_with_noise, simulate_trajectory,
    simulate_trajectory_stream, simulate_with_observer, DriftConvention, SdeConfig,
    TrajectoryRecord, NORM_FLOOR,
};
