use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::to_real;
use crate::error::{Error, Result};
use crate::geometry::{
    field_norm, field_scalar_curvature, CurvatureWorkspace, DiffusionField, GeometryConfig,
    MetricField,
};
use crate::quantum::{bloch_to_state, BlochPoint, EnvironmentModel};

/// Node grid on the sphere: `theta` from 0 to pi inclusive, `phi` on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        Self::square(96)
    }
}

impl BlochGrid {
    pub fn square(n: usize) -> Self {
        Self {
            n_theta: n,
            n_phi: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 3 || self.n_phi < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 nodes per axis, got {}x{}",
                self.n_theta, self.n_phi
            )));
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        let last = (self.n_theta - 1) as f64;
        (0..self.n_theta)
            .map(|i| {
                if i + 1 == self.n_theta {
                    PI
                } else {
                    PI * i as f64 / last
                }
            })
            .collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi)
            .map(|j| 2.0 * PI * j as f64 / self.n_phi as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `sqrt(x^T g x)`
    Norm,
    /// Scalar curvature.
    Curvature,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm" => Ok(Self::Norm),
            "curvature" => Ok(Self::Curvature),
            other => Err(Error::InvalidParameter(format!(
                "unknown quantity `{other}`"
            ))),
        }
    }
}

/// Values on a [`BlochGrid`], indexed `values[i_theta][i_phi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub quantity: Quantity,
}

impl ScalarField {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta][i_phi]
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV `theta,phi,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["theta", "phi", "value"])?;
        for (i, t) in self.thetas.iter().enumerate() {
            for (j, p) in self.phis.iter().enumerate() {
                w.write_record([t.to_string(), p.to_string(), self.values[i][j].to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// CSV `theta,phi,norm,scalar_curvature` from two fields on the same grid.
pub fn write_landscape_csv<W: Write>(
    norm: &ScalarField,
    curvature: &ScalarField,
    writer: W,
) -> Result<()> {
    if norm.thetas != curvature.thetas || norm.phis != curvature.phis {
        return Err(Error::InvalidParameter(
            "fields live on different grids".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["theta", "phi", "norm", "scalar_curvature"])?;
    for (i, t) in norm.thetas.iter().enumerate() {
        for (j, p) in norm.phis.iter().enumerate() {
            w.write_record([
                t.to_string(),
                p.to_string(),
                norm.values[i][j].to_string(),
                curvature.values[i][j].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Evaluates `quantity` at every grid node in parallel over `theta` rows.
pub fn scan_field(
    model: &EnvironmentModel,
    grid: &BlochGrid,
    quantity: Quantity,
    geometry: &GeometryConfig,
) -> Result<ScalarField> {
    if model.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: model.dim(),
        });
    }
    grid.validate()?;
    geometry.validate()?;
    let field = DiffusionField::new(model, geometry.columns)?;
    let thetas = grid.thetas();
    let phis = grid.phis();
    let rows: Vec<Result<Vec<f64>>> = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let mut ws = CurvatureWorkspace::new(field.real_dim());
            let mut row = Vec::with_capacity(phis.len());
            let mut pole_value = None;
            for (j, &phi) in phis.iter().enumerate() {
                let point = BlochPoint { theta, phi };
                let v = match pole_value {
                    Some(v) => v,
                    None => {
                        let x = to_real(&bloch_to_state(&point));
                        let v = match quantity {
                            Quantity::Norm => field_norm(&field, x.as_slice()),
                            Quantity::Curvature => {
                                field_scalar_curvature(&field, x.as_slice(), geometry, &mut ws)
                            }
                        };
                        if point.is_pole() {
                            pole_value = Some(v);
                        }
                        v
                    }
                };
                if !v.is_finite() {
                    return Err(Error::AtNode {
                        i_theta: i,
                        i_phi: j,
                        source: Box::new(Error::InvalidParameter(format!(
                            "non-finite {quantity:?} {v}"
                        ))),
                    });
                }
                row.push(v);
            }
            Ok(row)
        })
        .collect();
    let values = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ScalarField {
        thetas,
        phis,
        values,
        quantity,
    })
}
