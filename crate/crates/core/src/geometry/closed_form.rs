//! Entry formulas for the qubit diffusion metrics (shifted columns).

use crate::dynamics::RealStateVector;
use crate::error::{Error, Result};
use crate::geometry::DiffusionMetric;
use crate::linalg::RMatrix;
use crate::quantum::{Couplings, EnvironmentKind};

/// Invariants of a qubit point: `d1^2 = x1^2 + x3^2`, `d2^2 = x2^2 + x4^2`,
/// `s = x1 x2 + x3 x4`, `a = x1 x4 - x2 x3`, with `s^2 + a^2 = d1^2 d2^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMetricAux {
    pub d1sq: f64,
    pub d2sq: f64,
    pub s: f64,
    pub a: f64,
}

impl QubitMetricAux {
    pub fn new(x: &RealStateVector) -> Result<Self> {
        if x.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: x.dim(),
            });
        }
        let v = x.as_slice();
        let (x1, x2, x3, x4) = (v[0], v[1], v[2], v[3]);
        Ok(Self {
            d1sq: x1 * x1 + x3 * x3,
            d2sq: x2 * x2 + x4 * x4,
            s: x1 * x2 + x3 * x4,
            a: x1 * x4 - x2 * x3,
        })
    }
}

/// The four independent entries `(g11, g12, g14, g22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEntries {
    pub g11: f64,
    pub g12: f64,
    pub g14: f64,
    pub g22: f64,
}

impl QubitEntries {
    /// Full matrix with `g13 = g24 = 0`, `g23 = -g14`, `g33 = g11`, `g34 = g12`, `g44 = g22`.
    pub fn to_matrix(self) -> RMatrix {
        let Self { g11, g12, g14, g22 } = self;
        #[rustfmt::skip]
        let rows = [
            g11,  g12,  0.0,  g14,
            g12,  g22, -g14,  0.0,
            0.0, -g14,  g11,  g12,
            g14,  0.0,  g12,  g22,
        ];
        RMatrix::from_row_slice(4, 4, &rows)
    }
}

fn dephasing(mu: f64, q: &QubitMetricAux) -> QubitEntries {
    let c = mu * mu / 16.0;
    let QubitMetricAux { d1sq, d2sq, s, a } = *q;
    QubitEntries {
        g11: 0.5 + c * d1sq * (2.0 + d1sq).powi(2),
        g12: c * s * d1sq * (2.0 + d1sq),
        g14: c * a * d1sq * (2.0 + d1sq),
        g22: 0.5 + c * d1sq * d1sq * d2sq,
    }
}

fn measurement(mu: f64, q: &QubitMetricAux) -> QubitEntries {
    let c = mu * mu / 16.0;
    let QubitMetricAux { d1sq, d2sq, s, a } = *q;
    let diff = d1sq - d2sq;
    QubitEntries {
        g11: 0.5 + c * d1sq * (2.0 + diff).powi(2),
        g12: c * s * (diff + 2.0) * (diff - 2.0),
        g14: c * a * (diff * diff - 4.0),
        g22: 0.5 + c * d2sq * (2.0 - diff).powi(2),
    }
}

fn thermal(mu1: f64, mu2: f64, q: &QubitMetricAux) -> QubitEntries {
    let QubitMetricAux { d1sq, d2sq, s, a } = *q;
    let (p, m) = (mu1 + mu2, mu1 - mu2);
    let (s2, a2) = (s * s, a * a);
    let lam = p * p * s2 + m * m * a2;
    QubitEntries {
        g11: 0.5 + (4.0 * mu1 * mu1 * d2sq + lam * d1sq + 4.0 * mu1 * (p * s2 + m * a2)) / 16.0,
        g12: s * (4.0 * mu1 * mu2 + 2.0 * p * (mu1 * d2sq + mu2 * d1sq) + lam) / 16.0,
        g14: -a * (4.0 * mu1 * mu2 + 2.0 * m * (mu2 * d1sq - mu1 * d2sq) - lam) / 16.0,
        g22: 0.5 + (4.0 * mu2 * mu2 * d1sq + lam * d2sq + 4.0 * mu2 * (p * s2 - m * a2)) / 16.0,
    }
}

/// Closed-form metric of a qubit preset; agrees with the generic shifted
/// construction on all of `R^4`.
pub fn closed_form_qubit_metric(
    x: &RealStateVector,
    kind: EnvironmentKind,
    couplings: Couplings,
) -> Result<DiffusionMetric> {
    let q = QubitMetricAux::new(x)?;
    let entries = match kind {
        EnvironmentKind::Dephasing => dephasing(couplings.mu()?, &q),
        EnvironmentKind::Measurement => measurement(couplings.mu()?, &q),
        EnvironmentKind::Thermal => thermal(couplings.mu1()?, couplings.mu2()?, &q),
        EnvironmentKind::Custom => {
            return Err(Error::NotApplicable(
                "no closed form for custom environments".into(),
            ))
        }
    };
    Ok(DiffusionMetric {
        g: entries.to_matrix(),
        point: x.clone(),
    })
}

/// The entry lists as they are commonly quoted for these presets. The
/// dephasing list is exact; the thermal list, the measurement `g12`
/// (sign of one factor) and the measurement `g14` (missing prefactor,
/// wrong polynomial) disagree with the generic construction.
pub fn tabulated_qubit_metric(
    x: &RealStateVector,
    kind: EnvironmentKind,
    couplings: Couplings,
) -> Result<DiffusionMetric> {
    let q = QubitMetricAux::new(x)?;
    let QubitMetricAux { d1sq, d2sq, s, a } = q;
    let entries = match kind {
        EnvironmentKind::Dephasing => dephasing(couplings.mu()?, &q),
        EnvironmentKind::Thermal => {
            let (mu1, mu2) = (couplings.mu1()?, couplings.mu2()?);
            let mixed = d1sq * (2.0 + d2sq) * mu1 + (2.0 + d1sq) * d2sq * mu2;
            QubitEntries {
                g11: 0.5 + d2sq * (d1sq * mu1 * mu1 + (2.0 + d1sq).powi(2) * mu2 * mu2) / 16.0,
                g12: s * mixed / 16.0,
                g14: a * mixed / 16.0,
                g22: 0.5 + d1sq * (d2sq * mu2 * mu2 + (2.0 + d2sq).powi(2) * mu1 * mu1) / 16.0,
            }
        }
        EnvironmentKind::Measurement => {
            let c = couplings.mu()?.powi(2) / 16.0;
            QubitEntries {
                g11: 0.5 + c * d1sq * (2.0 + d1sq - d2sq).powi(2),
                g12: c * s * (d2sq - d1sq - 2.0) * (d1sq - d2sq + 2.0),
                g14: a * (d1sq + d2sq + d1sq * d2sq),
                g22: 0.5 + c * d2sq * (2.0 + d2sq - d1sq).powi(2),
            }
        }
        EnvironmentKind::Custom => {
            return Err(Error::NotApplicable(
                "no closed form for custom environments".into(),
            ))
        }
    };
    Ok(DiffusionMetric {
        g: entries.to_matrix(),
        point: x.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::to_real;
    use crate::geometry::{metric_at, ColumnConvention};
    use crate::linalg::max_abs_real;
    use crate::quantum::{bloch_to_state, make_environment, BlochPoint};
    use rand::{Rng, SeedableRng};

    fn presets() -> [(EnvironmentKind, Couplings); 3] {
        [
            (EnvironmentKind::Dephasing, Couplings::single(0.6)),
            (EnvironmentKind::Thermal, Couplings::pair(2.0, 1.0)),
            (EnvironmentKind::Measurement, Couplings::single(1.0)),
        ]
    }

    #[test]
    fn aux_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        for _ in 0..100 {
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let q = QubitMetricAux::new(&RealStateVector::from_slice(&v).unwrap()).unwrap();
            assert!((q.s * q.s + q.a * q.a - q.d1sq * q.d2sq).abs() < 1e-12);
        }
    }

    #[test]
    fn north_pole_dephasing() {
        let x = RealStateVector::from_slice(&[std::f64::consts::SQRT_2, 0.0, 0.0, 0.0]).unwrap();
        let g = closed_form_qubit_metric(&x, EnvironmentKind::Dephasing, Couplings::single(0.6))
            .unwrap()
            .g;
        assert_eq!(g[(0, 1)], 0.0);
        assert_eq!(g[(0, 3)], 0.0);
        assert_eq!(g[(1, 1)], 0.5);
        assert_eq!(g[(3, 3)], 0.5);
    }

    #[test]
    fn closed_forms_match_generic_metric_off_the_sphere_too() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for (kind, c) in presets() {
            let model = make_environment(kind, c).unwrap();
            for _ in 0..100 {
                let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let x = RealStateVector::from_slice(&v).unwrap();
                let generic = metric_at(&x, &model, ColumnConvention::Shifted).unwrap().g;
                let closed = closed_form_qubit_metric(&x, kind, c).unwrap().g;
                assert!(max_abs_real(&(generic - closed)) < 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn tabulated_dephasing_is_exact_and_others_are_not() {
        let x = to_real(&bloch_to_state(&BlochPoint::new(1.1, 0.7).unwrap()));
        for (kind, c) in presets() {
            let model = make_environment(kind, c).unwrap();
            let generic = metric_at(&x, &model, ColumnConvention::Shifted).unwrap().g;
            let err = max_abs_real(&(tabulated_qubit_metric(&x, kind, c).unwrap().g - generic));
            if kind == EnvironmentKind::Dephasing {
                assert!(err < 1e-12);
            } else {
                assert!(err > 1e-3, "{kind}: {err}");
            }
        }
    }

    #[test]
    fn rejects_custom_and_wrong_dimension() {
        let x = RealStateVector::from_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(
            closed_form_qubit_metric(&x, EnvironmentKind::Dephasing, Couplings::single(1.0))
                .is_err()
        );
        let y = RealStateVector::from_slice(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(
            closed_form_qubit_metric(&y, EnvironmentKind::Custom, Couplings::default()).is_err()
        );
    }
}
