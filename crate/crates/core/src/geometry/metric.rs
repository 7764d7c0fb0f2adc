use serde::{Deserialize, Serialize};

use crate::dynamics::{diffusion_columns, RealStateVector};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, max_abs, CMatrix, RMatrix, C64};
use crate::quantum::{EnvironmentModel, QuantumState};

/// Largest complex dimension the allocation-free metric field supports.
pub const MAX_FIELD_DIM: usize = 8;

/// How the columns entering the metric are built from `L_l` and `<L_l>`.
///
/// `Shifted` uses `(L + <L>) psi` and reproduces the qubit closed forms
/// and curvature landscapes; `Centered` uses the fluctuation
/// `(L - <L>) psi` that drives the dynamics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnConvention {
    #[default]
    Shifted,
    Centered,
}

impl ColumnConvention {
    fn sign(self) -> f64 {
        match self {
            Self::Shifted => 1.0,
            Self::Centered => -1.0,
        }
    }
}

impl std::str::FromStr for ColumnConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted" => Ok(Self::Shifted),
            "centered" => Ok(Self::Centered),
            other => Err(Error::InvalidParameter(format!(
                "unknown column convention `{other}`"
            ))),
        }
    }
}

/// A smooth Riemannian metric on `R^d`.
pub trait MetricField: Sync {
    fn real_dim(&self) -> usize;

    /// Writes `g(x)` row-major into `g` (length `d * d`).
    fn metric_into(&self, x: &[f64], g: &mut [f64]);
}

/// Diffusion metric `g = I/2 + calG` of an environment, evaluated at raw
/// (unnormalized) amplitudes.
#[derive(Debug, Clone)]
pub struct DiffusionField {
    n: usize,
    m: usize,
    ls: Vec<C64>,
    sign: f64,
}

impl DiffusionField {
    pub fn new(model: &EnvironmentModel, columns: ColumnConvention) -> Result<Self> {
        let n = model.dim();
        if n > MAX_FIELD_DIM {
            return Err(Error::InvalidParameter(format!(
                "metric field supports dimension up to {MAX_FIELD_DIM}, got {n}"
            )));
        }
        let mut ls = Vec::with_capacity(model.channels() * n * n);
        for l in model.lindblads() {
            for i in 0..n {
                for j in 0..n {
                    ls.push(l.matrix()[(i, j)]);
                }
            }
        }
        Ok(Self {
            n,
            m: model.channels(),
            ls,
            sign: columns.sign(),
        })
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `G = sum_l b_l b_l^dag` at raw amplitudes `psi`, row-major into `out`.
    fn complex_g(&self, psi: &[C64], out: &mut [C64]) {
        let n = self.n;
        out[..n * n].fill(C64::new(0.0, 0.0));
        let mut col = [C64::new(0.0, 0.0); MAX_FIELD_DIM];
        for l in 0..self.m {
            let lm = &self.ls[l * n * n..(l + 1) * n * n];
            let mut ev = C64::new(0.0, 0.0);
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    acc += lm[i * n + j] * psi[j];
                }
                col[i] = acc;
                ev += psi[i].conj() * acc;
            }
            let shift = ev * self.sign;
            for i in 0..n {
                col[i] += shift * psi[i];
            }
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += col[i] * col[j].conj();
                }
            }
        }
    }
}

impl MetricField for DiffusionField {
    fn real_dim(&self) -> usize {
        2 * self.n
    }

    fn metric_into(&self, x: &[f64], g: &mut [f64]) {
        let n = self.n;
        let d = 2 * n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = [C64::new(0.0, 0.0); MAX_FIELD_DIM];
        for i in 0..n {
            psi[i] = C64::new(x[i] * s, x[i + n] * s);
        }
        let mut gc = [C64::new(0.0, 0.0); MAX_FIELD_DIM * MAX_FIELD_DIM];
        self.complex_g(&psi[..n], &mut gc);
        for i in 0..n {
            for j in 0..n {
                let z = gc[i * n + j] * 0.5;
                let diag = if i == j { 0.5 } else { 0.0 };
                g[i * d + j] = diag + z.re;
                g[(i + n) * d + j + n] = diag + z.re;
                g[i * d + j + n] = -z.im;
                g[(i + n) * d + j] = z.im;
            }
        }
    }
}

/// `G = B B^dag` from the fluctuation columns.
pub fn complex_diffusion_matrix(state: &QuantumState, model: &EnvironmentModel) -> Result<CMatrix> {
    let b = diffusion_columns(state, model)?;
    Ok(&b * b.adjoint())
}

/// `calG = 1/2 [[Re G, -Im G], [Im G, Re G]]`.
pub fn real_diffusion_matrix(g: &CMatrix) -> Result<RMatrix> {
    if g.nrows() != g.ncols() {
        return Err(Error::NotSquare {
            rows: g.nrows(),
            cols: g.ncols(),
        });
    }
    let deviation = hermiticity_defect(g);
    if deviation > 1e-12 * max_abs(g).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = g.nrows();
    let mut out = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = g[(i, j)] * 0.5;
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    Ok(out)
}

/// Metric tensor at a point of `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMetric {
    pub g: RMatrix,
    pub point: RealStateVector,
}

impl DiffusionMetric {
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::symmetric_eigenvalues(&self.g)[0]
    }
}

fn field_matrix<F: MetricField + ?Sized>(field: &F, x: &[f64]) -> RMatrix {
    let d = field.real_dim();
    let mut buf = vec![0.0; d * d];
    field.metric_into(x, &mut buf);
    RMatrix::from_row_slice(d, d, &buf)
}

fn check_point(x: &RealStateVector, model: &EnvironmentModel) -> Result<()> {
    if x.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.dim(),
        });
    }
    Ok(())
}

/// `g(x)`; defined on all of `R^{2n}`.
pub fn metric_at(
    x: &RealStateVector,
    model: &EnvironmentModel,
    columns: ColumnConvention,
) -> Result<DiffusionMetric> {
    check_point(x, model)?;
    let field = DiffusionField::new(model, columns)?;
    Ok(DiffusionMetric {
        g: field_matrix(&field, x.as_slice()),
        point: x.clone(),
    })
}

/// `sqrt(x^T g(x) x)`; equals 1 on unit states where the diffusion vanishes.
pub fn metric_norm(
    x: &RealStateVector,
    model: &EnvironmentModel,
    columns: ColumnConvention,
) -> Result<f64> {
    check_point(x, model)?;
    let field = DiffusionField::new(model, columns)?;
    Ok(field_norm(&field, x.as_slice()))
}

pub(crate) fn field_norm<F: MetricField + ?Sized>(field: &F, x: &[f64]) -> f64 {
    let d = field.real_dim();
    let mut g = [0.0; 4 * MAX_FIELD_DIM * MAX_FIELD_DIM];
    field.metric_into(x, &mut g[..d * d]);
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += x[i] * g[i * d + j] * x[j];
        }
    }
    acc.sqrt()
}
