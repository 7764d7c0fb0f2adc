//! Fast self-checks of the numerics, run by `qsd verify`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dynamics::{ensemble_density, hermitian_gradient_check, to_real, SdeConfig};
use crate::error::Result;
use crate::geometry::{
    closed_form_qubit_metric, curvature, metric_at, scalar_curvature, ColumnConvention,
    GeometryConfig,
};
use crate::linalg::C64;
use crate::quantum::{
    bloch_to_state, lindblad_evolve_recorded, make_environment, BlochPoint, Couplings,
    DensityMatrix, EnvironmentKind, EnvironmentModel, OperatorMatrix, QuantumState,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const PRESETS: [(EnvironmentKind, Couplings); 3] = [
    (
        EnvironmentKind::Dephasing,
        Couplings {
            mu: Some(0.6),
            mu1: None,
            mu2: None,
        },
    ),
    (
        EnvironmentKind::Measurement,
        Couplings {
            mu: Some(1.0),
            mu1: None,
            mu2: None,
        },
    ),
    (
        EnvironmentKind::Thermal,
        Couplings {
            mu: None,
            mu1: Some(2.0),
            mu2: Some(1.0),
        },
    ),
];

fn random_states(n: usize, seed: u64) -> Vec<QuantumState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: Vec<C64> = (0..2)
                .map(|_| {
                    C64::new(
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    )
                })
                .collect();
            QuantumState::from_slice(&v).and_then(|s| s.normalized())
        })
        .collect::<Result<_>>()
        .expect("gaussian draws are almost surely non-zero")
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

fn closed_forms() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for (kind, c) in PRESETS {
        let model = make_environment(kind, c)?;
        for s in random_states(50, 11) {
            let x = to_real(&s);
            let g = metric_at(&x, &model, ColumnConvention::Shifted)?.g;
            let f = closed_form_qubit_metric(&x, kind, c)?.g;
            worst = worst.max((g - f).amax());
        }
    }
    Ok(outcome(
        "closed_form_metric",
        worst < 1e-12,
        format!("max entry error {worst:.2e}"),
    ))
}

fn flat_space() -> Result<CheckOutcome> {
    let model = EnvironmentModel::closed(OperatorMatrix::pauli_y())?;
    let cfg = GeometryConfig::default();
    let mut worst = 0.0f64;
    for s in random_states(10, 12) {
        let b = curvature(&to_real(&s), &model, &cfg)?;
        worst = worst.max(b.scalar.abs());
        worst = b.christoffel.data.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(outcome(
        "flat_geometry",
        worst < 1e-10,
        format!("max |R|, |Gamma| {worst:.2e}"),
    ))
}

fn reference_curvature() -> Result<CheckOutcome> {
    // exact values at (theta, phi) for dephasing mu = 0.6 and measurement mu = 1
    let cases = [
        (0, 1.1, 0.7, 0.16615524888155364),
        (0, 2.0, 4.0, -3.4720791073249035),
        (1, 0.3, 0.0, 8.263999314969686),
        (1, 2.9, 5.5, 8.44754638893294),
    ];
    let cfg = GeometryConfig::default();
    let mut worst = 0.0f64;
    for (p, theta, phi, want) in cases {
        let model = make_environment(PRESETS[p].0, PRESETS[p].1)?;
        let x = to_real(&bloch_to_state(&BlochPoint { theta, phi }));
        let got = scalar_curvature(&x, &model, &cfg)?;
        worst = worst.max((got - want).abs() / f64::max(1.0, want.abs()));
    }
    Ok(outcome(
        "reference_curvature",
        worst < 1e-7,
        format!("max relative error {worst:.2e}"),
    ))
}

fn gauge() -> Result<CheckOutcome> {
    let cfg = GeometryConfig::default();
    let mut worst = 0.0f64;
    for (kind, c) in PRESETS {
        let model = make_environment(kind, c)?;
        for s in random_states(5, 13) {
            let r0 = scalar_curvature(&to_real(&s), &model, &cfg)?;
            let r1 = scalar_curvature(&to_real(&s.with_global_phase(1.234)), &model, &cfg)?;
            worst = worst.max((r0 - r1).abs());
        }
    }
    Ok(outcome(
        "phase_invariance",
        worst < 1e-6,
        format!("max |dR| {worst:.2e}"),
    ))
}

fn gradient() -> Result<CheckOutcome> {
    let models = [
        make_environment(EnvironmentKind::Dephasing, Couplings::single(0.6))?
            .with_hamiltonian(OperatorMatrix::pauli_x().scaled(0.01))?,
        make_environment(EnvironmentKind::Measurement, Couplings::single(1.0))?
            .with_hamiltonian(OperatorMatrix::pauli_z())?,
    ];
    let mut worst = 0.0f64;
    for model in &models {
        for s in random_states(20, 14) {
            worst = worst.max(hermitian_gradient_check(&to_real(&s), model)?.max_residual());
        }
    }
    Ok(outcome(
        "gradient_form",
        worst < 1e-12,
        format!("max residual {worst:.2e}"),
    ))
}

fn plus() -> Result<QuantumState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    QuantumState::from_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)])
}

fn dephasing_decay() -> Result<CheckOutcome> {
    let mu = 0.6;
    let model = make_environment(EnvironmentKind::Dephasing, Couplings::single(mu))?;
    let rho0 = DensityMatrix::pure(&plus()?)?;
    let series = lindblad_evolve_recorded(&rho0, &model, 1.0, 1e-3, 1000)?;
    let got = series.states[1].matrix()[(0, 1)];
    let want = 0.5 * (-0.5 * mu * mu).exp();
    let err = (got - C64::new(want, 0.0)).norm();
    Ok(outcome(
        "master_equation_coherence",
        err < 1e-10,
        format!("error {err:.2e}"),
    ))
}

fn small_ensemble() -> Result<CheckOutcome> {
    let model = make_environment(EnvironmentKind::Dephasing, Couplings::single(0.6))?;
    let config = SdeConfig {
        steps: 1000,
        record_stride: 500,
        ..SdeConfig::default()
    };
    let ens = ensemble_density(&plus()?, &model, &config, 500)?;
    let rho0 = DensityMatrix::pure(&plus()?)?;
    let reference = lindblad_evolve_recorded(
        &rho0,
        &model,
        config.t_final(),
        config.dt,
        config.record_stride,
    )?;
    let mut worst = 0.0f64;
    for (k, rho) in ens.rho.iter().enumerate() {
        for (idx, z) in rho.matrix().iter().enumerate() {
            let d = z - reference.states[k].matrix()[idx];
            let se = ens.stderr[k][idx];
            worst = worst.max(d.re.abs() / (4.0 * se.re + 1e-12));
            worst = worst.max(d.im.abs() / (4.0 * se.im + 1e-12));
        }
    }
    Ok(outcome(
        "ensemble_vs_master",
        worst <= 1.0,
        format!("worst deviation {worst:.2} of 4 standard errors, 500 paths"),
    ))
}

/// Runs every check; an error inside a check is reported as a failure.
pub fn run_checks() -> Vec<CheckOutcome> {
    type Check = (&'static str, fn() -> Result<CheckOutcome>);
    let checks: [Check; 7] = [
        ("closed_form_metric", closed_forms),
        ("flat_geometry", flat_space),
        ("reference_curvature", reference_curvature),
        ("phase_invariance", gauge),
        ("gradient_form", gradient),
        ("master_equation_coherence", dephasing_decay),
        ("ensemble_vs_master", small_ensemble),
    ];
    checks
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| outcome(name, false, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
