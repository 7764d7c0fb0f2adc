use log::debug;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, CMatrix, C64, I};
use crate::quantum::{DensityMatrix, EnvironmentModel};

/// Trace drift tolerated before the state is rescaled.
pub const TRACE_RENORM_TOL: f64 = 1e-10;
/// Beyond these the integration is declared diverged.
const TRACE_FAIL_TOL: f64 = 1e-6;
const EIGEN_FAIL_FLOOR: f64 = -1e-8;

/// Right-hand side `-i[H, rho] + sum_l (L rho L^dag - {L^dag L, rho}/2)`.
pub fn lindblad_rhs(rho: &DensityMatrix, model: &EnvironmentModel) -> Result<CMatrix> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho.dim(),
        });
    }
    Ok(Generator::new(model).apply(rho.matrix()))
}

/// Precomputed operators of the generator.
struct Generator {
    h: CMatrix,
    ls: Vec<(CMatrix, CMatrix)>,
    ldl_sum: CMatrix,
}

impl Generator {
    fn new(model: &EnvironmentModel) -> Self {
        let n = model.dim();
        let mut ldl_sum = CMatrix::zeros(n, n);
        let ls = model
            .lindblads()
            .iter()
            .map(|l| {
                let l = l.matrix().clone();
                let ld = l.adjoint();
                ldl_sum += &ld * &l;
                (l, ld)
            })
            .collect();
        Self {
            h: model.hamiltonian().matrix().clone(),
            ls,
            ldl_sum,
        }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let hr = &self.h * rho;
        let mut out = (&hr - hr.adjoint()) * (-I);
        for (l, ld) in &self.ls {
            out += l * rho * ld;
        }
        let ar = &self.ldl_sum * rho;
        out -= (&ar + ar.adjoint()) * C64::new(0.5, 0.0);
        out
    }
}

/// Density matrices on a uniform time grid.
#[derive(Debug, Clone)]
pub struct LindbladSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// RK4 integration recording every step.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    model: &EnvironmentModel,
    t_final: f64,
    dt: f64,
) -> Result<LindbladSeries> {
    lindblad_evolve_recorded(rho0, model, t_final, dt, 1)
}

/// RK4 integration keeping `t = 0` and every `stride`-th step.
///
/// The number of steps is `ceil(t_final / dt)`; the step is shrunk so the
/// grid ends exactly at `t_final`.
pub fn lindblad_evolve_recorded(
    rho0: &DensityMatrix,
    model: &EnvironmentModel,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<LindbladSeries> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_final must be non-negative, got {t_final}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter(
            "record stride must be at least 1".into(),
        ));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho0.dim(),
        });
    }
    let gen = Generator::new(model);
    let steps = if t_final == 0.0 {
        0
    } else {
        (t_final / dt - 1e-9).ceil().max(1.0) as usize
    };
    let h = if steps == 0 {
        dt
    } else {
        t_final / steps as f64
    };
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut rho = rho0.matrix().clone();
    for k in 1..=steps {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1 * half));
        let k3 = gen.apply(&(&rho + &k2 * half));
        let k4 = gen.apply(&(&rho + &k3 * full));
        rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        let t = k as f64 * h;
        rho = check_and_repair(rho, t)?;
        if k % stride == 0 {
            let min_ev = hermitian_eigenvalues(&rho)[0];
            if min_ev < EIGEN_FAIL_FLOOR {
                return Err(Error::IntegrationDiverged {
                    time: t,
                    reason: format!("negative eigenvalue {min_ev:e}"),
                });
            }
            times.push(t);
            states.push(DensityMatrix::from_matrix_unchecked(rho.clone()));
        }
    }
    Ok(LindbladSeries { times, states })
}

fn check_and_repair(mut rho: CMatrix, t: f64) -> Result<CMatrix> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IntegrationDiverged {
            time: t,
            reason: "non-finite entry".into(),
        });
    }
    let dev = hermiticity_defect(&rho);
    if dev > TRACE_FAIL_TOL {
        return Err(Error::IntegrationDiverged {
            time: t,
            reason: format!("Hermiticity lost ({dev:e})"),
        });
    }
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let tr = rho.trace().re;
    let drift = (tr - 1.0).abs();
    if drift > TRACE_FAIL_TOL {
        return Err(Error::IntegrationDiverged {
            time: t,
            reason: format!("trace drifted to {tr}"),
        });
    }
    if drift > TRACE_RENORM_TOL {
        debug!("renormalizing trace {tr} at t = {t}");
        rho /= C64::new(tr, 0.0);
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::quantum::{
        make_environment, Couplings, EnvironmentKind, OperatorMatrix, QuantumState,
    };

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(
            &QuantumState::from_slice(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn excited_state_is_stationary_under_dephasing() {
        let m = make_environment(EnvironmentKind::Dephasing, Couplings::single(0.6)).unwrap();
        let rho = DensityMatrix::pure(&QuantumState::basis(2, 0).unwrap()).unwrap();
        assert!(max_abs(&lindblad_rhs(&rho, &m).unwrap()) < 1e-15);
    }

    #[test]
    fn mixed_state_is_stationary_under_measurement() {
        let m = make_environment(EnvironmentKind::Measurement, Couplings::single(1.3)).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(max_abs(&lindblad_rhs(&rho, &m).unwrap()) < 1e-15);
    }

    #[test]
    fn dephasing_coherence_decay_rate() {
        for mu in [0.3, 0.6, 1.7] {
            let m = make_environment(EnvironmentKind::Dephasing, Couplings::single(mu)).unwrap();
            let rho = plus();
            let d = lindblad_rhs(&rho, &m).unwrap();
            let expect = -(mu * mu / 2.0) * rho[(0, 1)];
            assert!((d[(0, 1)] - expect).norm() < 1e-15);
            assert!(d[(0, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let m = make_environment(EnvironmentKind::Thermal, Couplings::pair(2.0, 1.0)).unwrap();
        let s = lindblad_evolve(&plus(), &m, 0.0, 1e-3).unwrap();
        assert_eq!(s.times, vec![0.0]);
        assert_eq!(s.states, vec![plus()]);
    }

    #[test]
    fn dephasing_matches_analytic_solution() {
        let mu = 0.6;
        let m = make_environment(EnvironmentKind::Dephasing, Couplings::single(mu)).unwrap();
        let s = lindblad_evolve_recorded(&plus(), &m, 2.0, 1e-4, 1000).unwrap();
        assert_eq!(s.times.len(), 21);
        for (t, rho) in s.times.iter().zip(&s.states) {
            let expect = 0.5 * (-mu * mu * t / 2.0).exp();
            assert!((rho[(0, 1)].norm() - expect).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn unitary_evolution_rotates_coherence() {
        let h = OperatorMatrix::pauli_z();
        let m = crate::quantum::EnvironmentModel::closed(h).unwrap();
        let s = lindblad_evolve(&plus(), &m, 1.0, 1e-3).unwrap();
        let last = s.states.last().unwrap();
        let expect = C64::new(0.0, -2.0).exp() * 0.5;
        assert!((last[(0, 1)] - expect).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = make_environment(EnvironmentKind::Measurement, Couplings::single(1.0)).unwrap();
        assert!(lindblad_evolve(&plus(), &m, 1.0, 0.0).is_err());
        assert!(lindblad_evolve(&plus(), &m, -1.0, 1e-3).is_err());
        assert!(lindblad_evolve_recorded(&plus(), &m, 1.0, 1e-3, 0).is_err());
        assert!(lindblad_evolve(&DensityMatrix::maximally_mixed(3), &m, 1.0, 1e-3).is_err());
    }

    #[test]
    fn huge_step_diverges() {
        let m = make_environment(EnvironmentKind::Measurement, Couplings::single(10.0)).unwrap();
        let r = lindblad_evolve(&plus(), &m, 50.0, 1.0);
        assert!(matches!(r, Err(Error::IntegrationDiverged { .. })));
    }
}
