//! Landscapes over the Bloch sphere, coupling sweeps and path statistics.

mod collapse;
mod extrema;
mod landscape;
mod stability;
mod sweep;

pub use collapse::{pole_statistics, PoleStatistics};
pub use extrema::{find_extrema, near_maximal_nodes, ExtremumReport, SHARPNESS_RADIUS};
pub use landscape::{scan_field, write_landscape_csv, BlochGrid, Quantity, ScalarField};
pub use stability::{stability_experiment, StabilityConfig, StabilityReport, Verdict};
pub use sweep::{
    coupling_sweep, critical_coupling, curvature_along_path, preset_on_ray, SweepResult,
};
