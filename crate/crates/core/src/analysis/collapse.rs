use std::ops::ControlFlow;

use serde::Serialize;

use crate::dynamics::{run_indexed, simulate_with_observer, SdeConfig};
use crate::error::{Error, Result};
use crate::quantum::{EnvironmentModel, QuantumState};

/// Outcome counts of qubit paths that localize at the poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleStatistics {
    pub n_traj: usize,
    /// Paths reaching `<sigma_z> >= 1 - tol` (the excited state).
    pub north: usize,
    /// Paths reaching `<sigma_z> <= -1 + tol`.
    pub south: usize,
    pub unresolved: usize,
    /// Born probability `|c_0|^2` of the initial state.
    pub expected_north: f64,
}

impl PoleStatistics {
    pub fn north_fraction(&self) -> f64 {
        self.north as f64 / self.n_traj as f64
    }

    /// Distance of the north frequency from its Born value in binomial
    /// standard deviations.
    pub fn z_score(&self) -> f64 {
        let p = self.expected_north;
        let n = self.n_traj as f64;
        let sd = (p * (1.0 - p) / n).sqrt();
        (self.north_fraction() - p) / sd
    }
}

/// Runs qubit paths until `|<sigma_z>| >= 1 - tol` or `config.steps` elapse.
pub fn pole_statistics(
    state0: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    n_traj: usize,
    tol: f64,
) -> Result<PoleStatistics> {
    if state0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state0.dim(),
        });
    }
    if n_traj == 0 || !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need n_traj >= 1 and tol in (0, 1), got {n_traj}, {tol}"
        )));
    }
    let outcomes = run_indexed(n_traj, |k| {
        let mut outcome = 0i8;
        simulate_with_observer(state0, model, config, k, |_, _, psi| {
            let (a, b) = (psi[0].norm_sqr(), psi[1].norm_sqr());
            let z = (a - b) / (a + b);
            if z >= 1.0 - tol {
                outcome = 1;
                ControlFlow::Break(())
            } else if z <= tol - 1.0 {
                outcome = -1;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(outcome)
    })?;
    let count = |v: i8| outcomes.iter().filter(|o| **o == v).count();
    Ok(PoleStatistics {
        n_traj,
        north: count(1),
        south: count(-1),
        unresolved: count(0),
        expected_north: state0.amplitudes()[0].norm_sqr() / state0.norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{make_environment, Couplings, EnvironmentKind};

    #[test]
    fn eigenstate_resolves_immediately() {
        let m = make_environment(EnvironmentKind::Measurement, Couplings::single(1.0)).unwrap();
        let s = pole_statistics(
            &QuantumState::basis(2, 1).unwrap(),
            &m,
            &SdeConfig::default(),
            10,
            1e-6,
        )
        .unwrap();
        assert_eq!(s.south, 10);
        assert_eq!(s.expected_north, 0.0);
    }

    #[test]
    fn short_runs_stay_unresolved() {
        let m = make_environment(EnvironmentKind::Measurement, Couplings::single(0.1)).unwrap();
        let plus = crate::quantum::bloch_to_state(
            &crate::quantum::BlochPoint::new(std::f64::consts::FRAC_PI_2, 0.0).unwrap(),
        );
        let cfg = SdeConfig {
            steps: 10,
            ..SdeConfig::default()
        };
        let s = pole_statistics(&plus, &m, &cfg, 5, 1e-6).unwrap();
        assert_eq!(s.unresolved, 5);
    }
}
