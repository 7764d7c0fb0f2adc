use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::analysis::{find_extrema, scan_field, BlochGrid, Quantity};
use crate::dynamics::{run_indexed, simulate_with_observer, SdeConfig};
use crate::error::{Error, Result};
use crate::geometry::GeometryConfig;
use crate::linalg::CVector;
use crate::quantum::{
    bloch_to_state, make_environment, BlochPoint, Couplings, EnvironmentKind, EnvironmentModel,
    OperatorMatrix,
};

/// Settings of the residency experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub sde: SdeConfig,
    pub n_paths: usize,
    /// Residency radius in radians.
    pub delta: f64,
    /// Minimal mean resident fraction for a stable verdict.
    pub threshold: f64,
    pub grid: BlochGrid,
    pub geometry: GeometryConfig,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            sde: SdeConfig {
                dt: 1e-3,
                steps: 100_000,
                record_stride: 10,
                ..SdeConfig::default()
            },
            n_paths: 100,
            delta: 0.5,
            threshold: 0.8,
            grid: BlochGrid::default(),
            geometry: GeometryConfig::default(),
        }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        self.sde.validate()?;
        self.grid.validate()?;
        self.geometry.validate()?;
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, pi), got {}",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub model: EnvironmentModel,
    pub perturbation: OperatorMatrix,
    pub max_point: BlochPoint,
    pub max_curvature: f64,
    pub n_paths: usize,
    pub delta: f64,
    pub threshold: f64,
    pub fraction_resident: f64,
    pub verdict: Verdict,
    pub per_path: Vec<f64>,
    pub config: StabilityConfig,
}

impl StabilityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn bloch_of(psi: &CVector) -> [f64; 3] {
    let (c0, c1) = (psi[0], psi[1]);
    let nsq = c0.norm_sqr() + c1.norm_sqr();
    let x = c0.conj() * c1;
    [
        2.0 * x.re / nsq,
        2.0 * x.im / nsq,
        (c0.norm_sqr() - c1.norm_sqr()) / nsq,
    ]
}

/// Launches paths at the curvature maximum with `H = perturbation` and
/// measures the mean fraction of recorded times spent within `delta` of it.
pub fn stability_experiment(
    kind: EnvironmentKind,
    couplings: Couplings,
    perturbation: &OperatorMatrix,
    config: &StabilityConfig,
) -> Result<StabilityReport> {
    config.validate()?;
    let model = make_environment(kind, couplings)?.with_hamiltonian(perturbation.clone())?;
    let field = scan_field(&model, &config.grid, Quantity::Curvature, &config.geometry)?;
    let ext = find_extrema(&field)?;
    if ext.degenerate {
        return Err(Error::IllPosed(
            "curvature field is constant; no maximum to launch from".into(),
        ));
    }
    let target = ext.max_point.unit_vector();
    let start = bloch_to_state(&ext.max_point);
    let cos_delta = config.delta.cos();
    let per_path = run_indexed(config.n_paths, |k| {
        let (mut inside, mut total) = (0usize, 0usize);
        simulate_with_observer(&start, &model, &config.sde, k, |_, _, psi| {
            let b = bloch_of(psi);
            let cos = b[0] * target[0] + b[1] * target[1] + b[2] * target[2];
            inside += (cos >= cos_delta) as usize;
            total += 1;
            ControlFlow::Continue(())
        })?;
        Ok(inside as f64 / total as f64)
    })?;
    let fraction_resident = per_path.iter().sum::<f64>() / per_path.len() as f64;
    let verdict = if fraction_resident >= config.threshold {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        model,
        perturbation: perturbation.clone(),
        max_point: ext.max_point,
        max_curvature: ext.max_value,
        n_paths: config.n_paths,
        delta: config.delta,
        threshold: config.threshold,
        fraction_resident,
        verdict,
        per_path,
        config: *config,
    })
}
