use std::path::{Path, PathBuf};

use qsd_core::analysis::{BlochGrid, Quantity, StabilityConfig};
use qsd_core::dynamics::{DriftConvention, SdeConfig};
use qsd_core::geometry::{ColumnConvention, GeometryConfig};
use qsd_core::quantum::{
    make_environment, qubit_hamiltonian, BlochPoint, Couplings, EnvironmentKind, EnvironmentModel,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Flat run settings. Every command reads the subset it needs; the file
/// schema and the flags share these names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kind: EnvironmentKind,
    pub mu: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,

    pub quantity: Quantity,
    pub n_theta: usize,
    pub n_phi: usize,
    pub columns: ColumnConvention,
    pub metric_step: f64,
    pub christoffel_step: f64,
    pub richardson: bool,

    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub record_stride: usize,
    pub renormalize: bool,
    pub convention: DriftConvention,

    pub sweep_from: f64,
    pub sweep_to: f64,
    pub sweep_count: usize,

    pub lo: f64,
    pub hi: f64,
    pub tol: f64,

    pub theta: f64,
    pub phi: f64,
    pub stream: u64,
    pub path_curvature: bool,

    pub n_paths: usize,
    pub delta: f64,
    pub threshold: f64,

    pub threads: Option<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sde = SdeConfig::default();
        let geo = GeometryConfig::default();
        let grid = BlochGrid::default();
        let stab = StabilityConfig::default();
        Self {
            kind: EnvironmentKind::Dephasing,
            mu: None,
            mu1: None,
            mu2: None,
            hx: 0.0,
            hy: 0.0,
            hz: 0.0,
            quantity: Quantity::Curvature,
            n_theta: grid.n_theta,
            n_phi: grid.n_phi,
            columns: geo.columns,
            metric_step: geo.metric_step,
            christoffel_step: geo.christoffel_step,
            richardson: geo.richardson,
            dt: sde.dt,
            steps: sde.steps,
            seed: sde.seed,
            record_stride: sde.record_stride,
            renormalize: sde.renormalize_each_step,
            convention: sde.convention,
            sweep_from: 0.1,
            sweep_to: 2.0,
            sweep_count: 20,
            lo: 0.3,
            hi: 0.5,
            tol: 1e-3,
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            stream: 0,
            path_curvature: false,
            n_paths: stab.n_paths,
            delta: stab.delta,
            threshold: stab.threshold,
            threads: None,
            out: PathBuf::from("qsd-out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn couplings(&self) -> Couplings {
        Couplings {
            mu: self.mu,
            mu1: self.mu1,
            mu2: self.mu2,
        }
    }

    pub fn model(&self) -> Result<EnvironmentModel, CliError> {
        let model = make_environment(self.kind, self.couplings())?;
        if self.hx == 0.0 && self.hy == 0.0 && self.hz == 0.0 {
            return Ok(model);
        }
        Ok(model.with_hamiltonian(qubit_hamiltonian(self.hx, self.hy, self.hz))?)
    }

    pub fn grid(&self) -> BlochGrid {
        BlochGrid {
            n_theta: self.n_theta,
            n_phi: self.n_phi,
        }
    }

    pub fn geometry(&self) -> GeometryConfig {
        GeometryConfig {
            columns: self.columns,
            metric_step: self.metric_step,
            christoffel_step: self.christoffel_step,
            richardson: self.richardson,
        }
    }

    pub fn sde(&self) -> SdeConfig {
        SdeConfig {
            dt: self.dt,
            steps: self.steps,
            seed: self.seed,
            renormalize_each_step: self.renormalize,
            record_stride: self.record_stride,
            convention: self.convention,
        }
    }

    pub fn stability(&self) -> StabilityConfig {
        StabilityConfig {
            sde: self.sde(),
            n_paths: self.n_paths,
            delta: self.delta,
            threshold: self.threshold,
            grid: self.grid(),
            geometry: self.geometry(),
        }
    }

    pub fn start(&self) -> Result<BlochPoint, CliError> {
        Ok(BlochPoint::new(self.theta, self.phi)?)
    }

    pub fn sweep_points(&self) -> Result<Vec<f64>, CliError> {
        let n = self.sweep_count;
        let ordered = self.sweep_from > 0.0 && self.sweep_to >= self.sweep_from;
        if n == 0 || !ordered {
            return Err(CliError::Config(format!(
                "sweep needs 0 < sweep_from <= sweep_to and sweep_count >= 1, got {} .. {} x {n}",
                self.sweep_from, self.sweep_to
            )));
        }
        if n == 1 {
            return Ok(vec![self.sweep_from]);
        }
        let h = (self.sweep_to - self.sweep_from) / (n - 1) as f64;
        Ok((0..n).map(|k| self.sweep_from + h * k as f64).collect())
    }

    /// Artifact path for `default_name`, and the directory that receives `run.json`.
    ///
    /// An `out` with an extension names the artifact itself; otherwise it is
    /// a directory.
    pub fn artifact(&self, default_name: &str) -> (PathBuf, PathBuf) {
        if self.out.extension().is_some() {
            let dir = match self.out.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            (self.out.clone(), dir)
        } else {
            (self.out.join(default_name), self.out.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"mu": 0.6, "gamma": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig =
            serde_json::from_str(r#"{"kind": "thermal", "mu1": 2, "mu2": 1}"#).unwrap();
        assert_eq!(c.kind, EnvironmentKind::Thermal);
        assert_eq!(c.n_theta, 96);
        assert!(c.model().is_ok());
    }

    #[test]
    fn artifact_paths() {
        let mut c = RunConfig {
            out: PathBuf::from("field.csv"),
            ..RunConfig::default()
        };
        assert_eq!(
            c.artifact("scan.csv"),
            (PathBuf::from("field.csv"), PathBuf::from("."))
        );
        c.out = PathBuf::from("runs/a");
        assert_eq!(
            c.artifact("scan.csv"),
            (PathBuf::from("runs/a/scan.csv"), PathBuf::from("runs/a"))
        );
    }

    #[test]
    fn sweep_grid_includes_ends() {
        let c = RunConfig {
            sweep_from: 0.1,
            sweep_to: 2.0,
            sweep_count: 20,
            ..RunConfig::default()
        };
        let p = c.sweep_points().unwrap();
        assert_eq!(p.len(), 20);
        assert!((p[19] - 2.0).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12);
    }
}
