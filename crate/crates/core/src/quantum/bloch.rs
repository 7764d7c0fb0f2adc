use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::quantum::QuantumState;

/// Below this `sin(theta)` the azimuth is not meaningful and is pinned to 0.
pub const POLE_SIN_TOL: f64 = 1e-12;

/// Spherical angles of a qubit state: `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi = {phi} outside [0, 2 pi)"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Clamps `theta` into `[0, pi]` and wraps `phi` into `[0, 2 pi)`.
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn north() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn is_pole(&self) -> bool {
        self.theta.sin() < POLE_SIN_TOL
    }

    /// Unit Bloch vector `(sin t cos p, sin t sin p, cos t)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Great-circle angle between two points on the sphere.
    pub fn angle_to(&self, other: &BlochPoint) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let sin = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
        let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        sin.atan2(cos)
    }
}

/// `(cos(theta/2), e^{i phi} sin(theta/2))` with `c_0` real and non-negative.
/// At the poles the azimuth is ignored so every representative maps to one state.
pub fn bloch_to_state(point: &BlochPoint) -> QuantumState {
    let phi = if point.is_pole() { 0.0 } else { point.phi };
    let half = 0.5 * point.theta;
    let amps =
        CVector::from_column_slice(&[C64::new(half.cos(), 0.0), C64::from_polar(half.sin(), phi)]);
    QuantumState::from_vector_unchecked(amps)
}

/// Inverse of [`bloch_to_state`] for a normalized qubit state.
pub fn state_to_bloch(state: &QuantumState) -> Result<BlochPoint> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.dim(),
        });
    }
    state.require_normalized()?;
    let c0 = state.amplitudes()[0];
    let c1 = state.amplitudes()[1];
    // rotate the global phase so that c0 is real and >= 0
    let gauge = if c0.norm() > 0.0 {
        C64::from_polar(1.0, -c0.arg())
    } else {
        C64::new(1.0, 0.0)
    };
    let c0 = (c0 * gauge).re.max(0.0);
    let c1 = c1 * gauge;
    let theta = 2.0 * c1.norm().atan2(c0);
    let phi = if theta.sin() < POLE_SIN_TOL {
        0.0
    } else {
        c1.arg().rem_euclid(2.0 * PI)
    };
    Ok(BlochPoint::wrapped(theta, phi))
}

/// `(<sigma_x>, <sigma_y>, <sigma_z>)` of a qubit state, divided by its squared norm.
pub fn bloch_vector(state: &QuantumState) -> Result<[f64; 3]> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.dim(),
        });
    }
    let c0 = state.amplitudes()[0];
    let c1 = state.amplitudes()[1];
    let n2 = state.norm_sqr();
    let off = c0.conj() * c1;
    Ok([
        2.0 * off.re / n2,
        2.0 * off.im / n2,
        (c0.norm_sqr() - c1.norm_sqr()) / n2,
    ])
}
