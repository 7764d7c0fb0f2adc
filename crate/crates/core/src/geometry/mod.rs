//! The diffusion metric on `R^{2n}` and its curvature.

mod closed_form;
mod curvature;
mod metric;

pub use closed_form::{
    closed_form_qubit_metric, tabulated_qubit_metric, QubitEntries, QubitMetricAux,
};
pub use curvature::{
    christoffel, curvature, field_christoffel, field_curvature, field_metric_derivative,
    field_scalar_curvature, ricci_scalar, riemann, scalar_curvature, Christoffel, CurvatureBundle,
    CurvatureWorkspace, GeometryConfig, Riemann,
};
pub use metric::{
    complex_diffusion_matrix, metric_at, metric_norm, real_diffusion_matrix, ColumnConvention,
    DiffusionField, DiffusionMetric, MetricField, MAX_FIELD_DIM,
};

pub(crate) use metric::field_norm;
