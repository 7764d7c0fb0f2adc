use crate::dynamics::{from_real, real_drift_diffusion, DriftConvention, RealStateVector};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, CMatrix, RVector};
use crate::quantum::{raw_expectation, EnvironmentModel, HERMITIAN_TOL};

/// Largest deviations between the real SDE coefficients and their gradient form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub drift_residual: f64,
    pub diffusion_residual: f64,
}

impl GradientReport {
    pub fn max_residual(&self) -> f64 {
        self.drift_residual.max(self.diffusion_residual)
    }
}

/// `(d<A>/dq, d<A>/dp) = (A^R q - A^I p, A^R p + A^I q)` for Hermitian `A`.
fn gradient(a: &CMatrix, x: &RVector) -> RVector {
    let n = a.nrows();
    RVector::from_fn(2 * n, |i, _| {
        let (row, imag_part) = (i % n, i >= n);
        (0..n)
            .map(|j| {
                let (q, p) = (x[j], x[j + n]);
                let z = a[(row, j)];
                if imag_part {
                    z.re * p + z.im * q
                } else {
                    z.re * q - z.im * p
                }
            })
            .sum()
    })
}

/// Compares the unhalved real drift and the diffusion block with
///
/// * `F = J grad<H> - grad(Var L) - <L>^2 X`, where `J grad = (d/dp, -d/dq)`,
/// * `B[:, 0] = (grad<L> - <L> X) / sqrt 2` and `B[:, 1]` its rotation
///   `(a_q, a_p) -> (-a_p, a_q)`,
///
/// valid for one Hermitian Lindblad operator at a unit-norm point.
pub fn hermitian_gradient_check(
    x: &RealStateVector,
    model: &EnvironmentModel,
) -> Result<GradientReport> {
    if model.channels() != 1 {
        return Err(Error::NotApplicable(format!(
            "gradient form needs exactly one Lindblad operator, got {}",
            model.channels()
        )));
    }
    let l = model.lindblads()[0].matrix();
    let defect = hermiticity_defect(l);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotApplicable(format!(
            "Lindblad operator is not Hermitian (deviation {defect:e})"
        )));
    }
    let n = model.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let (f, b) = real_drift_diffusion(x, model, DriftConvention::Unhalved)?;

    let xv = x.as_vector();
    let psi = from_real(x);
    let l2 = l * l;
    let ev = raw_expectation(psi.amplitudes(), l).re;
    let grad_h = gradient(model.hamiltonian().matrix(), xv);
    let grad_l = gradient(l, xv);
    let grad_var = gradient(&l2, xv) - &grad_l * (2.0 * ev);
    let mut drift_residual = 0.0f64;
    let mut diffusion_residual = 0.0f64;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let fq = grad_h[i + n] - grad_var[i] - ev * ev * xv[i];
        let fp = -grad_h[i] - grad_var[i + n] - ev * ev * xv[i + n];
        drift_residual = drift_residual
            .max((f[i] - fq).abs())
            .max((f[i + n] - fp).abs());

        let cq = (grad_l[i] - ev * xv[i]) * s;
        let cp = (grad_l[i + n] - ev * xv[i + n]) * s;
        diffusion_residual = diffusion_residual
            .max((b[(i, 0)] - cq).abs())
            .max((b[(i + n, 0)] - cp).abs())
            .max((b[(i, 1)] + cp).abs())
            .max((b[(i + n, 1)] - cq).abs());
    }
    Ok(GradientReport {
        drift_residual,
        diffusion_residual,
    })
}
