use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis::{scan_field, BlochGrid, Quantity};
use crate::dynamics::{to_real, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::geometry::{
    field_scalar_curvature, CurvatureWorkspace, DiffusionField, GeometryConfig, MetricField,
};
use crate::quantum::{make_environment, Couplings, EnvironmentKind, EnvironmentModel};

/// Grid extremes of the curvature along a one-parameter family of presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: EnvironmentKind,
    pub couplings: Vec<f64>,
    pub max_curvature: Vec<f64>,
    pub min_curvature: Vec<f64>,
}

impl SweepResult {
    /// CSV `coupling,max_curvature,min_curvature`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["coupling", "max_curvature", "min_curvature"])?;
        for ((c, hi), lo) in self
            .couplings
            .iter()
            .zip(&self.max_curvature)
            .zip(&self.min_curvature)
        {
            w.write_record([c.to_string(), hi.to_string(), lo.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Preset at parameter `c` of the sweep ray (`mu = c`, or `mu1 = 2 mu2 = 2 c`).
pub fn preset_on_ray(kind: EnvironmentKind, c: f64) -> Result<EnvironmentModel> {
    make_environment(kind, Couplings::on_ray(kind, c))
}

fn extremes(
    kind: EnvironmentKind,
    c: f64,
    grid: &BlochGrid,
    geometry: &GeometryConfig,
) -> Result<(f64, f64)> {
    let field = scan_field(
        &preset_on_ray(kind, c)?,
        grid,
        Quantity::Curvature,
        geometry,
    )?;
    Ok((field.max(), field.min()))
}

/// Scans the curvature for every coupling and records its grid maximum and minimum.
pub fn coupling_sweep(
    kind: EnvironmentKind,
    couplings: &[f64],
    grid: &BlochGrid,
    geometry: &GeometryConfig,
) -> Result<SweepResult> {
    if couplings.is_empty() {
        return Err(Error::InvalidParameter("empty coupling grid".into()));
    }
    if couplings.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "couplings must be strictly increasing".into(),
        ));
    }
    let mut out = SweepResult {
        kind,
        couplings: couplings.to_vec(),
        max_curvature: Vec::with_capacity(couplings.len()),
        min_curvature: Vec::with_capacity(couplings.len()),
    };
    for &c in couplings {
        let (hi, lo) = extremes(kind, c, grid, geometry)?;
        out.max_curvature.push(hi);
        out.min_curvature.push(lo);
    }
    Ok(out)
}

/// Coupling where the maximal curvature changes sign, by bisection to width `tol`.
pub fn critical_coupling(
    kind: EnvironmentKind,
    lo: f64,
    hi: f64,
    tol: f64,
    grid: &BlochGrid,
    geometry: &GeometryConfig,
) -> Result<f64> {
    if !(lo < hi) || !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] and {tol}"
        )));
    }
    let max_at = |c: f64| extremes(kind, c, grid, geometry).map(|(m, _)| m);
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (max_at(a)?, max_at(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            value_lo: fa,
            value_hi: fb,
        });
    }
    let positive_at_lo = fa > 0.0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if (max_at(mid)? > 0.0) == positive_at_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Scalar curvature at each recorded state.
pub fn curvature_along_path(
    record: &TrajectoryRecord,
    model: &EnvironmentModel,
    geometry: &GeometryConfig,
) -> Result<Vec<f64>> {
    geometry.validate()?;
    let field = DiffusionField::new(model, geometry.columns)?;
    let mut ws = CurvatureWorkspace::new(field.real_dim());
    record
        .states
        .iter()
        .map(|s| {
            if s.dim() != model.dim() {
                return Err(Error::DimensionMismatch {
                    expected: model.dim(),
                    found: s.dim(),
                });
            }
            if !s.is_normalized() {
                return Err(Error::NotNormalized { norm: s.norm() });
            }
            Ok(field_scalar_curvature(
                &field,
                to_real(s).as_slice(),
                geometry,
                &mut ws,
            ))
        })
        .collect()
}
