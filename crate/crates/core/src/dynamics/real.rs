use std::f64::consts::SQRT_2;

use crate::dynamics::{diffusion_columns, drift, DriftConvention};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, RMatrix, RVector, C64};
use crate::quantum::{EnvironmentModel, QuantumState};

/// Point `(q_1..q_n, p_1..p_n)` of `R^{2n}` with `q = sqrt 2 Re psi`, `p = sqrt 2 Im psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStateVector {
    x: RVector,
}

impl RealStateVector {
    pub fn new(x: RVector) -> Result<Self> {
        if x.len() < 4 || !x.len().is_multiple_of(2) {
            return Err(Error::InvalidState(format!(
                "real coordinates need an even length of at least 4, got {}",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite coordinate".into()));
        }
        Ok(Self { x })
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        Self::new(RVector::from_column_slice(x))
    }

    pub fn as_vector(&self) -> &RVector {
        &self.x
    }

    pub fn as_slice(&self) -> &[f64] {
        self.x.as_slice()
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.x.len() / 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_squared()
    }
}

pub fn to_real(state: &QuantumState) -> RealStateVector {
    RealStateVector {
        x: complex_to_real(state.amplitudes()),
    }
}

pub fn from_real(x: &RealStateVector) -> QuantumState {
    QuantumState::from_vector_unchecked(real_to_complex(&x.x))
}

/// `sqrt 2 (Re v, Im v)`.
pub fn complex_to_real(v: &CVector) -> RVector {
    let n = v.len();
    RVector::from_fn(2 * n, |i, _| {
        if i < n {
            SQRT_2 * v[i].re
        } else {
            SQRT_2 * v[i - n].im
        }
    })
}

pub fn real_to_complex(x: &RVector) -> CVector {
    let n = x.len() / 2;
    CVector::from_fn(n, |i, _| C64::new(x[i], x[i + n]) / SQRT_2)
}

/// Real block form `[[Re B, -Im B], [Im B, Re B]]` of the diffusion columns.
pub fn real_diffusion_block(b: &CMatrix) -> RMatrix {
    let (n, m) = b.shape();
    let mut out = RMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for l in 0..m {
            let z = b[(i, l)];
            out[(i, l)] = z.re;
            out[(i, l + m)] = -z.im;
            out[(i + n, l)] = z.im;
            out[(i + n, l + m)] = z.re;
        }
    }
    out
}

/// Drift `F` and diffusion `B` of the real SDE `dX = F dt + B (dW^R, dW^I)`.
///
/// `F` is the image of the complex drift under [`to_real`], so that
/// `from_real(x + F dt + B w)` reproduces the complex step with
/// `dW = (w^R + i w^I) / sqrt 2`. Consequently `B B^T` is twice the real
/// diffusion matrix.
pub fn real_drift_diffusion(
    x: &RealStateVector,
    model: &EnvironmentModel,
    convention: DriftConvention,
) -> Result<(RVector, RMatrix)> {
    let state = from_real(x);
    let f = drift(&state, model, convention)?;
    let b = diffusion_columns(&state, model)?;
    Ok((complex_to_real(&f), real_diffusion_block(&b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::noise::{sample_wiener, trajectory_rng};
    use crate::dynamics::{em_step_with_noise, SdeConfig};
    use crate::quantum::{
        bloch_to_state, make_environment, qubit_hamiltonian, BlochPoint, Couplings, EnvironmentKind,
    };
    use rand::{Rng, SeedableRng};

    #[test]
    fn basis_examples() {
        let e = QuantumState::basis(2, 0).unwrap();
        assert_eq!(to_real(&e).as_slice(), &[SQRT_2, 0.0, 0.0, 0.0]);
        let g = QuantumState::from_slice(&[C64::new(0.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert_eq!(to_real(&g).as_slice(), &[0.0, 0.0, 0.0, SQRT_2]);
    }

    #[test]
    fn roundtrip_and_unit_norm() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..200 {
            let p = BlochPoint::new(
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
            .unwrap();
            let s = bloch_to_state(&p).with_global_phase(rng.gen_range(0.0..6.0));
            let x = to_real(&s);
            assert!((x.norm_sqr() - 2.0).abs() < 1e-14);
            let back = from_real(&x);
            assert!((back.amplitudes() - s.amplitudes()).camax() < 1e-15);
        }
        assert!(RealStateVector::from_slice(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn flat_model_has_zero_coefficients() {
        let m = crate::quantum::EnvironmentModel::closed(crate::quantum::OperatorMatrix::zeros(2))
            .unwrap();
        let x = to_real(&bloch_to_state(&BlochPoint::new(0.4, 1.0).unwrap()));
        let (f, b) = real_drift_diffusion(&x, &m, DriftConvention::GisinPercival).unwrap();
        assert_eq!(f.norm(), 0.0);
        assert_eq!(b.len(), 0);
    }

    #[test]
    fn real_step_reproduces_complex_step() {
        let mut rng = trajectory_rng(17, 0);
        for (kind, c) in [
            (EnvironmentKind::Dephasing, Couplings::single(0.6)),
            (EnvironmentKind::Thermal, Couplings::pair(2.0, 1.0)),
            (EnvironmentKind::Measurement, Couplings::single(1.0)),
        ] {
            let m = make_environment(kind, c)
                .unwrap()
                .with_hamiltonian(qubit_hamiltonian(0.01, 0.0, 0.2))
                .unwrap();
            for conv in [DriftConvention::GisinPercival, DriftConvention::Unhalved] {
                let cfg = SdeConfig {
                    dt: 1e-3,
                    renormalize_each_step: false,
                    convention: conv,
                    ..SdeConfig::default()
                };
                let mut s = bloch_to_state(&BlochPoint::new(1.2, 0.3).unwrap());
                for _ in 0..100 {
                    let w = sample_wiener(1, cfg.dt, &mut rng);
                    let x = to_real(&s);
                    let (f, b) = real_drift_diffusion(&x, &m, conv).unwrap();
                    let xr =
                        x.as_vector() + f * cfg.dt + b * RVector::from_vec(w.real_components());
                    let next = em_step_with_noise(&s, &m, &cfg, &w).unwrap();
                    let via_real = from_real(&RealStateVector::new(xr).unwrap());
                    assert!((via_real.amplitudes() - next.amplitudes()).camax() < 1e-13);
                    s = next.normalized().unwrap();
                }
            }
        }
    }
}
