use serde::{Deserialize, Serialize};

use crate::analysis::ScalarField;
use crate::error::{Error, Result};
use crate::quantum::BlochPoint;

/// Angular radius of the neighbourhood used for the sharpness score.
pub const SHARPNESS_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub max_point: BlochPoint,
    pub max_value: f64,
    pub min_point: BlochPoint,
    pub min_value: f64,
    /// `(max - mean within SHARPNESS_RADIUS of the maximum) / (max - min)`,
    /// the mean weighted by solid angle.
    pub sharpness: f64,
    /// Set when the field is constant; sharpness is then 0.
    pub degenerate: bool,
}

/// Solid angle of the cell around row `i`, per node.
fn cell_weights(field: &ScalarField) -> Vec<f64> {
    let t = &field.thetas;
    let n = t.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { 0.0 } else { 0.5 * (t[i - 1] + t[i]) };
            let hi = if i + 1 == n {
                std::f64::consts::PI
            } else {
                0.5 * (t[i] + t[i + 1])
            };
            (lo.cos() - hi.cos()) / field.phis.len() as f64
        })
        .collect()
}

fn arg_extreme(field: &ScalarField, sign: f64) -> (usize, usize) {
    let mut best = (0, 0);
    let mut value = f64::NEG_INFINITY;
    for (i, row) in field.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if sign * v > value {
                value = sign * v;
                best = (i, j);
            }
        }
    }
    best
}

/// Least-squares quadratic on the 3x3 neighbourhood of `(i, j)` for `sign * f`;
/// returns the offset in grid units and the fitted value when the fit has a
/// maximum inside the neighbourhood.
fn refine(field: &ScalarField, i: usize, j: usize, sign: f64) -> Option<(f64, f64, f64)> {
    let nt = field.thetas.len();
    let np = field.phis.len();
    if i == 0 || i + 1 == nt {
        return None;
    }
    let f = |u: i64, v: i64| {
        let jj = (j as i64 + v).rem_euclid(np as i64) as usize;
        sign * field.values[(i as i64 + u) as usize][jj]
    };
    let (mut mean, mut b, mut c, mut d, mut e, mut g) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for u in -1..=1i64 {
        for v in -1..=1i64 {
            let val = f(u, v);
            let (uf, vf) = (u as f64, v as f64);
            mean += val / 9.0;
            b += uf * val / 6.0;
            c += vf * val / 6.0;
            d += (uf * uf - 2.0 / 3.0) * val / 2.0;
            e += uf * vf * val / 4.0;
            g += (vf * vf - 2.0 / 3.0) * val / 2.0;
        }
    }
    let a = mean - 2.0 / 3.0 * (d + g);
    let fit = |u: f64, v: f64| a + b * u + c * v + d * u * u + e * u * v + g * v * v;
    let f0 = f(0, 0);
    let accept = |u: f64, v: f64| {
        let val = fit(u, v);
        (u.abs() <= 1.0 && v.abs() <= 1.0 && val >= f0).then_some((u, v, sign * val))
    };
    let det = 4.0 * d * g - e * e;
    if d < 0.0 && det > 0.0 {
        let u = (-2.0 * g * b + e * c) / det;
        let v = (-2.0 * d * c + e * b) / det;
        if let Some(r) = accept(u, v) {
            return Some(r);
        }
    }
    if d < 0.0 {
        if let Some(r) = accept(-b / (2.0 * d), 0.0) {
            return Some(r);
        }
    }
    if g < 0.0 {
        return accept(0.0, -c / (2.0 * g));
    }
    None
}

fn locate(field: &ScalarField, sign: f64) -> (BlochPoint, f64) {
    let (i, j) = arg_extreme(field, sign);
    let dt = field.thetas[1] - field.thetas[0];
    let dp = field.phis[1] - field.phis[0];
    let (theta, phi) = (field.thetas[i], field.phis[j]);
    match refine(field, i, j, sign) {
        Some((u, v, val)) => (BlochPoint::wrapped(theta + u * dt, phi + v * dp), val),
        None => (BlochPoint::wrapped(theta, phi), field.values[i][j]),
    }
}

/// Maximum and minimum with local refinement and a sharpness score.
pub fn find_extrema(field: &ScalarField) -> Result<ExtremumReport> {
    if field.thetas.len() < 3 || field.phis.len() < 3 {
        return Err(Error::InvalidParameter("field grid too small".into()));
    }
    if field.values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "field has non-finite values".into(),
        ));
    }
    let (max_point, max_value) = locate(field, 1.0);
    let (min_point, min_value) = locate(field, -1.0);
    let range = max_value - min_value;
    let degenerate = range <= 1e-12 * max_value.abs().max(1.0);
    let sharpness = if degenerate {
        0.0
    } else {
        let w = cell_weights(field);
        let (mut acc, mut mass) = (0.0, 0.0);
        for (i, row) in field.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let p = BlochPoint {
                    theta: field.thetas[i],
                    phi: field.phis[j],
                };
                if p.angle_to(&max_point) <= SHARPNESS_RADIUS {
                    acc += w[i] * v;
                    mass += w[i];
                }
            }
        }
        (max_value - acc / mass) / range
    };
    Ok(ExtremumReport {
        max_point,
        max_value,
        min_point,
        min_value,
        sharpness,
        degenerate,
    })
}

/// Grid nodes whose value is within `tol` of the field maximum.
pub fn near_maximal_nodes(field: &ScalarField, tol: f64) -> Vec<BlochPoint> {
    let max = field.max();
    let mut out = Vec::new();
    for (i, row) in field.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if *v >= max - tol {
                out.push(BlochPoint {
                    theta: field.thetas[i],
                    phi: field.phis[j],
                });
            }
        }
    }
    out
}
