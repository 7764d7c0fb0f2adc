//! Checks against independently computed reference values.

use qsd_core::dynamics::{diffusion_columns, drift, to_real, DriftConvention};
use qsd_core::geometry::{
    complex_diffusion_matrix, metric_at, scalar_curvature, ColumnConvention, GeometryConfig,
};
use qsd_core::linalg::{CMatrix, C64};
use qsd_core::quantum::{
    bloch_to_state, lindblad_evolve, lindblad_rhs, make_environment, qubit_hamiltonian, BlochPoint,
    Couplings, DensityMatrix, EnvironmentKind, EnvironmentModel, OperatorMatrix, QuantumState,
};

const POINTS: [(f64, f64); 6] = [
    (0.3, 0.0),
    (1.1, 0.7),
    (2.0, 4.0),
    (2.9, 5.5),
    (0.0, 0.0),
    (1.8653, 0.0),
];

// Scalar curvature from exact symbolic derivatives of the metric polynomials.
const DEPHASING_06_SHIFTED: [f64; 6] = [
    2.6262717783379057,
    0.16615524888155364,
    -3.4720791073249035,
    -1.662992004820609,
    2.816780611593042,
    -3.2576189754401965,
];
const DEPHASING_06_CENTERED: [f64; 6] = [
    -1.539141858875227,
    -2.4366664132519102,
    -2.460013901620829,
    -1.501025174626972,
    -1.4400000000000002,
    -2.585489365855514,
];
const DEPHASING_05_SHIFTED: [f64; 6] = [
    1.5652093067136024,
    -0.595492269879595,
    -2.8217415834398114,
    -1.1604818207353458,
    1.750000000000001,
    -2.7960834916584396,
];
const DEPHASING_05_CENTERED: [f64; 6] = [
    -1.0744311350722653,
    -1.7216767787413105,
    -1.7426813346803192,
    -1.0468879368499293,
    -1.0000000000000002,
    -1.8304951694719995,
];
const THERMAL_21_SHIFTED: [f64; 6] = [
    -29.61720507331368,
    0.3038565362692006,
    3.1764966790124936,
    0.5101493547965845,
    -48.0,
    9.411384291113515,
];
const THERMAL_21_CENTERED: [f64; 6] = [
    -12.724730281111075,
    -10.46743235093846,
    -19.74245311397051,
    -24.15281419026059,
    -14.0,
    -11.07510483326704,
];
const MEASUREMENT_1_SHIFTED: [f64; 6] = [
    8.263999314969686,
    -2.452303936283606,
    -3.572502623412558,
    8.44754638893294,
    8.768,
    -7.283320446054622,
];
const MEASUREMENT_1_CENTERED: [f64; 6] = [
    -6.770082718157786,
    -12.026252508896233,
    -12.354084118881678,
    -7.055568898538023,
    -7.999999999999999,
    -13.220638862060877,
];

fn check_curvature(
    kind: EnvironmentKind,
    c: Couplings,
    columns: ColumnConvention,
    expected: &[f64; 6],
) {
    let model = make_environment(kind, c).unwrap();
    let cfg = GeometryConfig {
        columns,
        ..GeometryConfig::default()
    };
    for ((theta, phi), want) in POINTS.iter().zip(expected) {
        let x = to_real(&bloch_to_state(&BlochPoint {
            theta: *theta,
            phi: *phi,
        }));
        let got = scalar_curvature(&x, &model, &cfg).unwrap();
        let err = (got - want).abs() / want.abs().max(1.0);
        assert!(
            err < 1e-7,
            "{kind} {columns:?} at ({theta}, {phi}): {got} vs {want}"
        );
    }
}

#[test]
fn scalar_curvature_matches_symbolic_reference() {
    use ColumnConvention::{Centered, Shifted};
    use EnvironmentKind::{Dephasing, Measurement, Thermal};
    check_curvature(
        Dephasing,
        Couplings::single(0.6),
        Shifted,
        &DEPHASING_06_SHIFTED,
    );
    check_curvature(
        Dephasing,
        Couplings::single(0.6),
        Centered,
        &DEPHASING_06_CENTERED,
    );
    check_curvature(
        Dephasing,
        Couplings::single(0.5),
        Shifted,
        &DEPHASING_05_SHIFTED,
    );
    check_curvature(
        Dephasing,
        Couplings::single(0.5),
        Centered,
        &DEPHASING_05_CENTERED,
    );
    check_curvature(
        Thermal,
        Couplings::pair(2.0, 1.0),
        Shifted,
        &THERMAL_21_SHIFTED,
    );
    check_curvature(
        Thermal,
        Couplings::pair(2.0, 1.0),
        Centered,
        &THERMAL_21_CENTERED,
    );
    check_curvature(
        Measurement,
        Couplings::single(1.0),
        Shifted,
        &MEASUREMENT_1_SHIFTED,
    );
    check_curvature(
        Measurement,
        Couplings::single(1.0),
        Centered,
        &MEASUREMENT_1_CENTERED,
    );
}

type M2 = [[C64; 2]; 2];

fn m2(op: &OperatorMatrix) -> M2 {
    let m = op.matrix();
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// `G = L P L^dag - <L> P L^dag - conj<L> L P + |<L>|^2 P` with `P = |psi><psi|`,
/// written out entry by entry.
fn expanded_g(l: &M2, c: [C64; 2]) -> M2 {
    let p = [
        [c[0] * c[0].conj(), c[0] * c[1].conj()],
        [c[1] * c[0].conj(), c[1] * c[1].conj()],
    ];
    let mut ev = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            ev += c[i].conj() * l[i][j] * c[j];
        }
    }
    let zero = C64::new(0.0, 0.0);
    let mut out = [[zero; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut lpl = zero;
            let mut pl = zero;
            let mut lp = zero;
            for a in 0..2 {
                for b in 0..2 {
                    lpl += l[i][a] * p[a][b] * l[j][b].conj();
                }
                pl += p[i][a] * l[j][a].conj();
                lp += l[i][a] * p[a][j];
            }
            out[i][j] = lpl - ev * pl - ev.conj() * lp + ev.norm_sqr() * p[i][j];
        }
    }
    out
}

#[test]
fn diffusion_matrix_matches_expanded_polynomial() {
    let presets = [
        (EnvironmentKind::Dephasing, Couplings::single(0.6)),
        (EnvironmentKind::Measurement, Couplings::single(1.3)),
        (EnvironmentKind::Thermal, Couplings::pair(2.0, 0.7)),
    ];
    for (kind, c) in presets {
        let model = make_environment(kind, c).unwrap();
        let l = m2(&model.lindblads()[0]);
        for &(theta, phi) in &POINTS {
            let s = bloch_to_state(&BlochPoint { theta, phi });
            let amps = s.amplitudes();
            let want = expanded_g(&l, [amps[0], amps[1]]);
            let got = complex_diffusion_matrix(&s, &model).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (got[(i, j)] - want[i][j]).norm() < 1e-13,
                        "{kind} ({theta}, {phi}) [{i}{j}]"
                    );
                }
            }
        }
    }
}

/// Stationary state from the null space of the superoperator.
fn stationary_state(model: &EnvironmentModel) -> CMatrix {
    let n = model.dim();
    let mut sup = CMatrix::zeros(n * n, n * n);
    for k in 0..n * n {
        let mut e = CMatrix::zeros(n, n);
        e[(k / n, k % n)] = C64::new(1.0, 0.0);
        let col = lindblad_rhs_raw(&e, model);
        for r in 0..n * n {
            sup[(r, k)] = col[(r / n, r % n)];
        }
    }
    let svd = sup.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut rho = CMatrix::zeros(n, n);
    for r in 0..n * n {
        rho[(r / n, r % n)] = v_t[(idx, r)].conj();
    }
    let tr = rho.trace();
    rho / tr
}

/// `lindblad_rhs` wants a density matrix; split a basis matrix into Hermitian
/// pieces that are valid states up to an affine shift.
fn lindblad_rhs_raw(e: &CMatrix, model: &EnvironmentModel) -> CMatrix {
    let n = model.dim();
    let mixed = DensityMatrix::maximally_mixed(n);
    let base = lindblad_rhs(&mixed, model).unwrap();
    let apply = |h: &CMatrix| -> CMatrix {
        // rho = I/n + eps h is a valid state for small eps and Hermitian traceless h.
        let eps = 1e-3;
        let tr = h.trace();
        let traceless = h - CMatrix::identity(n, n) * (tr / n as f64);
        let rho =
            DensityMatrix::new(mixed.matrix() + traceless.clone() * C64::new(eps, 0.0)).unwrap();
        let d = (lindblad_rhs(&rho, model).unwrap() - &base) / C64::new(eps, 0.0);
        d + base.clone() * tr
    };
    let herm = (e + e.adjoint()) * C64::new(0.5, 0.0);
    let anti = (e - e.adjoint()) * C64::new(0.0, -0.5);
    apply(&herm) + apply(&anti) * C64::new(0.0, 1.0)
}

#[test]
fn long_time_evolution_reaches_superoperator_fixed_point() {
    let model = make_environment(EnvironmentKind::Thermal, Couplings::pair(1.2, 0.8))
        .unwrap()
        .with_hamiltonian(qubit_hamiltonian(0.3, 0.0, 0.5))
        .unwrap();
    let fixed = stationary_state(&model);
    let rho0 = DensityMatrix::pure(&QuantumState::basis(2, 0).unwrap()).unwrap();
    let series = lindblad_evolve(&rho0, &model, 40.0, 1e-2).unwrap();
    let last = series.states.last().unwrap().matrix();
    assert!((last - &fixed).camax() < 1e-9, "{last} vs {fixed}");
}

#[test]
fn metric_does_not_depend_on_drift_convention() {
    // The diffusion columns are shared by both drift conventions; only the drift changes.
    let model = make_environment(EnvironmentKind::Measurement, Couplings::single(0.9)).unwrap();
    let s = bloch_to_state(&BlochPoint {
        theta: 1.2,
        phi: 0.4,
    });
    let b = diffusion_columns(&s, &model).unwrap();
    let g = complex_diffusion_matrix(&s, &model).unwrap();
    assert!((&b * b.adjoint() - g).camax() < 1e-14);
    let f1 = drift(&s, &model, DriftConvention::GisinPercival).unwrap();
    let f2 = drift(&s, &model, DriftConvention::Unhalved).unwrap();
    assert!((f2 - f1 * C64::new(2.0, 0.0)).camax() < 1e-14);
    let m = metric_at(&to_real(&s), &model, ColumnConvention::Centered).unwrap();
    assert!(m.min_eigenvalue() >= 0.5 - 1e-12);
}
