//! Allocation-free drift and diffusion evaluation shared by every integrator.

use crate::dynamics::DriftConvention;
use crate::linalg::C64;
use crate::quantum::EnvironmentModel;

/// Row-major copies of `H`, the `L_l` and `sum_l L_l^dag L_l`.
#[derive(Debug, Clone)]
pub(crate) struct SdeKernel {
    pub n: usize,
    pub m: usize,
    h: Vec<C64>,
    ls: Vec<C64>,
    ldl: Vec<C64>,
    gain: f64,
    damp: f64,
}

fn row_major(m: &crate::linalg::CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[inline]
fn matvec(a: &[C64], x: &[C64], out: &mut [C64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &a[i * n..(i + 1) * n];
        let mut acc = C64::new(0.0, 0.0);
        for (r, v) in row.iter().zip(x) {
            acc += r * v;
        }
        *o = acc;
    }
}

impl SdeKernel {
    pub fn new(model: &EnvironmentModel, convention: DriftConvention) -> Self {
        let n = model.dim();
        let mut ls = Vec::with_capacity(model.channels() * n * n);
        let mut ldl = crate::linalg::CMatrix::zeros(n, n);
        for l in model.lindblads() {
            ls.extend(row_major(l.matrix()));
            ldl += l.matrix().adjoint() * l.matrix();
        }
        let (gain, damp) = match convention {
            DriftConvention::GisinPercival => (1.0, 0.5),
            DriftConvention::Unhalved => (2.0, 1.0),
        };
        Self {
            n,
            m: model.channels(),
            h: row_major(model.hamiltonian().matrix()),
            ls,
            ldl: row_major(&ldl),
            gain,
            damp,
        }
    }

    /// Writes the drift into `f` and the diffusion columns into `b`
    /// (column `l` at `b[l n..(l + 1) n]`). Expectations are divided by `psi† psi`.
    /// `scratch` needs length `n`.
    pub fn eval(&self, psi: &[C64], f: &mut [C64], b: &mut [C64], scratch: &mut [C64]) {
        let n = self.n;
        let nsq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        matvec(&self.h, psi, scratch);
        matvec(&self.ldl, psi, f);
        for i in 0..n {
            f[i] = C64::new(scratch[i].im, -scratch[i].re) - f[i] * self.damp;
        }
        for l in 0..self.m {
            let col = &mut b[l * n..(l + 1) * n];
            matvec(&self.ls[l * n * n..(l + 1) * n * n], psi, col);
            let mut ev = C64::new(0.0, 0.0);
            for (p, c) in psi.iter().zip(col.iter()) {
                ev += p.conj() * c;
            }
            ev /= nsq;
            let a = ev.conj() * self.gain;
            let d = ev.norm_sqr() * self.damp;
            for i in 0..n {
                f[i] += a * col[i] - psi[i] * d;
                col[i] -= ev * psi[i];
            }
        }
    }
}
