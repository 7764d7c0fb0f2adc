//! Levi-Civita connection and curvature of a metric field by nested central
//! differences.

use serde::{Deserialize, Serialize};

use crate::dynamics::RealStateVector;
use crate::error::{Error, Result};
use crate::geometry::{ColumnConvention, DiffusionField, MetricField};
use crate::linalg::RMatrix;
use crate::quantum::EnvironmentModel;

/// Finite-difference and metric settings for curvature evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub columns: ColumnConvention,
    /// Step for derivatives of the metric.
    pub metric_step: f64,
    /// Step for derivatives of the Christoffel symbols.
    pub christoffel_step: f64,
    /// One level of Richardson extrapolation on both differences.
    pub richardson: bool,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            columns: ColumnConvention::Shifted,
            metric_step: 2e-3,
            christoffel_step: 3e-3,
            richardson: true,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, h) in [
            ("metric_step", self.metric_step),
            ("christoffel_step", self.christoffel_step),
        ] {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }
}

/// `Gamma^k_{mu nu}` stored as `[k][mu][nu]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, mu: usize, nu: usize) -> f64 {
        self.data[(k * self.dim + mu) * self.dim + nu]
    }
}

/// `R^k_{lambda mu nu}` stored as `[k][lambda][mu][nu]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, k: usize, l: usize, mu: usize, nu: usize) -> f64 {
        let d = self.dim;
        self.data[((k * d + l) * d + mu) * d + nu]
    }
}

/// All curvature quantities at one point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    pub ricci: RMatrix,
    pub scalar: f64,
    pub point: Vec<f64>,
    pub fd_step: f64,
}

#[derive(Serialize)]
struct BundleRepr<'a> {
    point: &'a [f64],
    fd_step: f64,
    scalar: f64,
    ricci: Vec<Vec<f64>>,
    christoffel: Vec<Vec<Vec<f64>>>,
    riemann: Vec<Vec<Vec<Vec<f64>>>>,
}

impl CurvatureBundle {
    /// JSON with tensors nested as `[k][mu][nu]` and `[k][lambda][mu][nu]`.
    pub fn to_json(&self) -> Result<String> {
        let d = self.christoffel.dim;
        let r = 0..d;
        let repr = BundleRepr {
            point: &self.point,
            fd_step: self.fd_step,
            scalar: self.scalar,
            ricci: r
                .clone()
                .map(|i| (0..d).map(|j| self.ricci[(i, j)]).collect())
                .collect(),
            christoffel: r
                .clone()
                .map(|k| {
                    (0..d)
                        .map(|m| (0..d).map(|n| self.christoffel.get(k, m, n)).collect())
                        .collect()
                })
                .collect(),
            riemann: r
                .map(|k| {
                    (0..d)
                        .map(|l| {
                            (0..d)
                                .map(|m| (0..d).map(|n| self.riemann.get(k, l, m, n)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }
}

/// Scratch space for one evaluation point; reuse it across points to avoid
/// allocation.
pub struct CurvatureWorkspace {
    d: usize,
    xs: Vec<f64>,
    gp: Vec<f64>,
    gm: Vec<f64>,
    g: Vec<f64>,
    ginv: Vec<f64>,
    chol: Vec<f64>,
    dg: Vec<f64>,
    gam1: Vec<f64>,
    gam: Vec<f64>,
    gam_p: Vec<f64>,
    gam_m: Vec<f64>,
    dgam: Vec<f64>,
    inner_ginv: Vec<f64>,
}

impl CurvatureWorkspace {
    pub fn new(d: usize) -> Self {
        let z = |len| vec![0.0; len];
        Self {
            d,
            xs: z(d),
            gp: z(d * d),
            gm: z(d * d),
            g: z(d * d),
            ginv: z(d * d),
            chol: z(d * d),
            dg: z(d * d * d),
            gam1: z(d * d * d),
            gam: z(d * d * d),
            gam_p: z(d * d * d),
            gam_m: z(d * d * d),
            dgam: z(d * d * d * d),
            inner_ginv: z(d * d),
        }
    }
}

/// Inverse of a symmetric positive definite matrix by Cholesky.
fn invert_spd(a: &[f64], l: &mut [f64], out: &mut [f64], d: usize) {
    l.fill(0.0);
    for j in 0..d {
        let mut s = a[j * d + j];
        for k in 0..j {
            s -= l[j * d + k] * l[j * d + k];
        }
        let ljj = s.sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = s / ljj;
        }
    }
    // Columns of L^{-T} L^{-1}.
    for c in 0..d {
        // Forward solve L y = e_c, stored in out column c.
        for i in 0..d {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * d + k] * out[k * d + c];
            }
            out[i * d + c] = s / l[i * d + i];
        }
        // Back solve L^T z = y.
        for i in (0..d).rev() {
            let mut s = out[i * d + c];
            for k in i + 1..d {
                s -= l[k * d + i] * out[k * d + c];
            }
            out[i * d + c] = s / l[i * d + i];
        }
    }
}

/// `dg[k][a][b] = d_k g_ab` at `x`.
#[allow(clippy::too_many_arguments)]
fn metric_derivative_into<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    h: f64,
    richardson: bool,
    xs: &mut [f64],
    gp: &mut [f64],
    gm: &mut [f64],
    dg: &mut [f64],
) {
    let d = field.real_dim();
    let dd = d * d;
    xs.copy_from_slice(x);
    for k in 0..d {
        let out = &mut dg[k * dd..(k + 1) * dd];
        xs[k] = x[k] + h;
        field.metric_into(xs, gp);
        xs[k] = x[k] - h;
        field.metric_into(xs, gm);
        for i in 0..dd {
            out[i] = (gp[i] - gm[i]) / (2.0 * h);
        }
        if richardson {
            let h2 = 0.5 * h;
            xs[k] = x[k] + h2;
            field.metric_into(xs, gp);
            xs[k] = x[k] - h2;
            field.metric_into(xs, gm);
            for i in 0..dd {
                let fine = (gp[i] - gm[i]) / (2.0 * h2);
                out[i] = (4.0 * fine - out[i]) / 3.0;
            }
        }
        xs[k] = x[k];
    }
}

/// Christoffel symbols at `x` into `gam`; `ginv` receives `g^{-1}(x)`.
#[allow(clippy::too_many_arguments)]
fn christoffel_into<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    cfg: &GeometryConfig,
    xs: &mut [f64],
    gp: &mut [f64],
    gm: &mut [f64],
    g: &mut [f64],
    chol: &mut [f64],
    ginv: &mut [f64],
    dg: &mut [f64],
    gam1: &mut [f64],
    gam: &mut [f64],
) {
    let d = field.real_dim();
    let dd = d * d;
    field.metric_into(x, g);
    invert_spd(g, chol, ginv, d);
    metric_derivative_into(field, x, cfg.metric_step, cfg.richardson, xs, gp, gm, dg);
    // gam1[l][m][n] = (d_m g_ln + d_n g_lm - d_l g_mn) / 2
    for l in 0..d {
        for m in 0..d {
            for n in m..d {
                let v = 0.5
                    * (dg[m * dd + l * d + n] + dg[n * dd + l * d + m] - dg[l * dd + m * d + n]);
                gam1[(l * d + m) * d + n] = v;
                gam1[(l * d + n) * d + m] = v;
            }
        }
    }
    for k in 0..d {
        for mn in 0..dd {
            let mut acc = 0.0;
            for l in 0..d {
                acc += ginv[k * d + l] * gam1[l * dd + mn];
            }
            gam[k * dd + mn] = acc;
        }
    }
}

impl CurvatureWorkspace {
    fn christoffel_at<F: MetricField + ?Sized>(
        &mut self,
        field: &F,
        x: &[f64],
        cfg: &GeometryConfig,
        target: Target,
    ) {
        let out = match target {
            Target::Center => &mut self.gam,
            Target::Plus => &mut self.gam_p,
            Target::Minus => &mut self.gam_m,
        };
        let ginv = match target {
            Target::Center => &mut self.ginv,
            _ => &mut self.inner_ginv,
        };
        christoffel_into(
            field,
            x,
            cfg,
            &mut self.xs,
            &mut self.gp,
            &mut self.gm,
            &mut self.g,
            &mut self.chol,
            ginv,
            &mut self.dg,
            &mut self.gam1,
            out,
        );
    }

    /// Fills `gam`, `ginv` and `dgam[mu][k][m][n] = d_mu Gamma^k_{mn}`.
    fn connection_and_derivative<F: MetricField + ?Sized>(
        &mut self,
        field: &F,
        x: &[f64],
        cfg: &GeometryConfig,
    ) {
        let d = self.d;
        let d3 = d * d * d;
        let mut xo = [0.0f64; 4 * crate::geometry::MAX_FIELD_DIM];
        let xo = &mut xo[..d];
        xo.copy_from_slice(x);
        self.christoffel_at(field, x, cfg, Target::Center);
        let h = cfg.christoffel_step;
        for mu in 0..d {
            xo[mu] = x[mu] + h;
            self.christoffel_at(field, xo, cfg, Target::Plus);
            xo[mu] = x[mu] - h;
            self.christoffel_at(field, xo, cfg, Target::Minus);
            for i in 0..d3 {
                self.dgam[mu * d3 + i] = (self.gam_p[i] - self.gam_m[i]) / (2.0 * h);
            }
            if cfg.richardson {
                let h2 = 0.5 * h;
                xo[mu] = x[mu] + h2;
                self.christoffel_at(field, xo, cfg, Target::Plus);
                xo[mu] = x[mu] - h2;
                self.christoffel_at(field, xo, cfg, Target::Minus);
                for i in 0..d3 {
                    let fine = (self.gam_p[i] - self.gam_m[i]) / (2.0 * h2);
                    self.dgam[mu * d3 + i] = (4.0 * fine - self.dgam[mu * d3 + i]) / 3.0;
                }
            }
            xo[mu] = x[mu];
        }
    }

    #[inline]
    fn riemann_component(&self, k: usize, l: usize, m: usize, n: usize) -> f64 {
        let d = self.d;
        let d3 = d * d * d;
        let gam = |a: usize, b: usize, c: usize| self.gam[(a * d + b) * d + c];
        let dgam = |s: usize, a: usize, b: usize, c: usize| self.dgam[s * d3 + (a * d + b) * d + c];
        let mut v = dgam(m, k, n, l) - dgam(n, k, m, l);
        for e in 0..d {
            v += gam(e, n, l) * gam(k, m, e) - gam(e, m, l) * gam(k, n, e);
        }
        v
    }

    fn scalar_from_state(&self) -> f64 {
        let d = self.d;
        let mut scalar = 0.0;
        for m in 0..d {
            for n in 0..d {
                let gi = self.ginv[m * d + n];
                if gi == 0.0 {
                    continue;
                }
                let mut ric = 0.0;
                for l in 0..d {
                    ric += self.riemann_component(l, m, l, n);
                }
                scalar += gi * ric;
            }
        }
        scalar
    }
}

#[derive(Clone, Copy)]
enum Target {
    Center,
    Plus,
    Minus,
}

fn check_dim<F: MetricField + ?Sized>(field: &F, x: &[f64]) -> Result<()> {
    if x.len() != field.real_dim() {
        return Err(Error::DimensionMismatch {
            expected: field.real_dim(),
            found: x.len(),
        });
    }
    if field.real_dim() > 4 * crate::geometry::MAX_FIELD_DIM {
        return Err(Error::InvalidParameter("metric dimension too large".into()));
    }
    Ok(())
}

/// Partial derivatives `[k][a][b] = d_k g_ab` of a metric field.
pub fn field_metric_derivative<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    cfg: &GeometryConfig,
) -> Result<Vec<f64>> {
    check_dim(field, x)?;
    cfg.validate()?;
    let d = field.real_dim();
    let (mut xs, mut gp, mut gm, mut dg) = (
        vec![0.0; d],
        vec![0.0; d * d],
        vec![0.0; d * d],
        vec![0.0; d * d * d],
    );
    metric_derivative_into(
        field,
        x,
        cfg.metric_step,
        cfg.richardson,
        &mut xs,
        &mut gp,
        &mut gm,
        &mut dg,
    );
    Ok(dg)
}

/// Christoffel symbols of a metric field.
pub fn field_christoffel<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    cfg: &GeometryConfig,
) -> Result<Christoffel> {
    check_dim(field, x)?;
    cfg.validate()?;
    let d = field.real_dim();
    let mut ws = CurvatureWorkspace::new(d);
    ws.christoffel_at(field, x, cfg, Target::Center);
    Ok(Christoffel {
        dim: d,
        data: ws.gam,
    })
}

/// Scalar curvature only, reusing `ws`; the hot path of landscape scans.
pub fn field_scalar_curvature<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    cfg: &GeometryConfig,
    ws: &mut CurvatureWorkspace,
) -> f64 {
    debug_assert_eq!(ws.d, field.real_dim());
    ws.connection_and_derivative(field, x, cfg);
    ws.scalar_from_state()
}

/// Christoffel symbols, Riemann and Ricci tensors and the scalar curvature.
pub fn field_curvature<F: MetricField + ?Sized>(
    field: &F,
    x: &[f64],
    cfg: &GeometryConfig,
) -> Result<CurvatureBundle> {
    check_dim(field, x)?;
    cfg.validate()?;
    let d = field.real_dim();
    let mut ws = CurvatureWorkspace::new(d);
    ws.connection_and_derivative(field, x, cfg);
    let mut riemann = vec![0.0; d * d * d * d];
    for k in 0..d {
        for l in 0..d {
            for m in 0..d {
                for n in 0..d {
                    riemann[((k * d + l) * d + m) * d + n] = ws.riemann_component(k, l, m, n);
                }
            }
        }
    }
    let ricci = RMatrix::from_fn(d, d, |m, n| {
        (0..d).map(|l| riemann[((l * d + m) * d + l) * d + n]).sum()
    });
    let mut scalar = 0.0;
    for m in 0..d {
        for n in 0..d {
            scalar += ws.ginv[m * d + n] * ricci[(m, n)];
        }
    }
    Ok(CurvatureBundle {
        christoffel: Christoffel {
            dim: d,
            data: ws.gam.clone(),
        },
        riemann: Riemann {
            dim: d,
            data: riemann,
        },
        ricci,
        scalar,
        point: x.to_vec(),
        fd_step: cfg.christoffel_step,
    })
}

fn model_field(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<DiffusionField> {
    if x.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.dim(),
        });
    }
    DiffusionField::new(model, cfg.columns)
}

/// Christoffel symbols of the diffusion metric.
pub fn christoffel(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<Christoffel> {
    field_christoffel(&model_field(x, model, cfg)?, x.as_slice(), cfg)
}

/// Riemann tensor of the diffusion metric.
pub fn riemann(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<Riemann> {
    Ok(curvature(x, model, cfg)?.riemann)
}

/// Ricci tensor and scalar curvature of the diffusion metric.
pub fn ricci_scalar(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<(RMatrix, f64)> {
    let b = curvature(x, model, cfg)?;
    Ok((b.ricci, b.scalar))
}

pub fn curvature(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<CurvatureBundle> {
    field_curvature(&model_field(x, model, cfg)?, x.as_slice(), cfg)
}

/// Scalar curvature alone.
pub fn scalar_curvature(
    x: &RealStateVector,
    model: &EnvironmentModel,
    cfg: &GeometryConfig,
) -> Result<f64> {
    let field = model_field(x, model, cfg)?;
    cfg.validate()?;
    let mut ws = CurvatureWorkspace::new(field.real_dim());
    Ok(field_scalar_curvature(&field, x.as_slice(), cfg, &mut ws))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Round sphere of radius `r` in stereographic coordinates: `R = 2 / r^2`.
    struct Sphere(f64);

    impl MetricField for Sphere {
        fn real_dim(&self) -> usize {
            2
        }
        fn metric_into(&self, x: &[f64], g: &mut [f64]) {
            let c = 4.0 * self.0 * self.0 / (1.0 + x[0] * x[0] + x[1] * x[1]).powi(2);
            g.copy_from_slice(&[c, 0.0, 0.0, c]);
        }
    }

    /// Poincare half plane: `R = -2`.
    struct HalfPlane;

    impl MetricField for HalfPlane {
        fn real_dim(&self) -> usize {
            2
        }
        fn metric_into(&self, x: &[f64], g: &mut [f64]) {
            let c = 1.0 / (x[1] * x[1]);
            g.copy_from_slice(&[c, 0.0, 0.0, c]);
        }
    }

    /// Product of two round 2-spheres of radius 1 in stereographic charts: `R = 4`.
    struct TwoSpheres;

    impl MetricField for TwoSpheres {
        fn real_dim(&self) -> usize {
            4
        }
        fn metric_into(&self, x: &[f64], g: &mut [f64]) {
            g.fill(0.0);
            let a = 4.0 / (1.0 + x[0] * x[0] + x[1] * x[1]).powi(2);
            let b = 4.0 / (1.0 + x[2] * x[2] + x[3] * x[3]).powi(2);
            g[0] = a;
            g[5] = a;
            g[10] = b;
            g[15] = b;
        }
    }

    /// Non-diagonal metric `g = I + v v^T` with `v = (x2, x0 x1, 0.3)`.
    struct Skewed;

    impl MetricField for Skewed {
        fn real_dim(&self) -> usize {
            3
        }
        fn metric_into(&self, x: &[f64], g: &mut [f64]) {
            let v = [x[2], x[0] * x[1], 0.3];
            for i in 0..3 {
                for j in 0..3 {
                    g[i * 3 + j] = if i == j { 1.0 } else { 0.0 } + v[i] * v[j];
                }
            }
        }
    }

    #[test]
    fn cholesky_inverse() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let mut l = [0.0; 9];
        let mut inv = [0.0; 9];
        invert_spd(&a, &mut l, &mut inv, 3);
        let am = RMatrix::from_row_slice(3, 3, &a);
        let im = RMatrix::from_row_slice(3, 3, &inv);
        assert!((am * im - RMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn constant_curvature_references() {
        let cfg = GeometryConfig::default();
        for x in [[0.1, -0.3], [0.7, 0.2], [-1.2, 0.9]] {
            let r = field_curvature(&Sphere(1.0), &x, &cfg).unwrap().scalar;
            assert!((r - 2.0).abs() < 1e-7, "{r}");
            let r = field_curvature(&Sphere(2.0), &x, &cfg).unwrap().scalar;
            assert!((r - 0.5).abs() < 1e-7, "{r}");
        }
        for x in [[0.0, 1.0], [0.4, 2.5]] {
            let r = field_curvature(&HalfPlane, &x, &cfg).unwrap().scalar;
            assert!((r + 2.0).abs() < 1e-7, "{r}");
        }
        let mut ws = CurvatureWorkspace::new(4);
        let r = field_scalar_curvature(&TwoSpheres, &[0.2, 0.1, -0.5, 0.3], &cfg, &mut ws);
        assert!((r - 4.0).abs() < 1e-7, "{r}");
    }

    #[test]
    fn half_plane_christoffels() {
        // Gamma^0_{01} = Gamma^1_{11} = -1/y, Gamma^1_{00} = 1/y.
        let y = 1.7;
        let c = field_christoffel(&HalfPlane, &[0.3, y], &GeometryConfig::default()).unwrap();
        assert!((c.get(0, 0, 1) + 1.0 / y).abs() < 1e-10);
        assert!((c.get(1, 1, 1) + 1.0 / y).abs() < 1e-10);
        assert!((c.get(1, 0, 0) - 1.0 / y).abs() < 1e-10);
        assert!(c.get(0, 0, 0).abs() < 1e-10);
    }

    #[test]
    fn tensor_symmetries_on_skewed_metric() {
        let cfg = GeometryConfig::default();
        let b = field_curvature(&Skewed, &[0.4, -0.8, 0.6], &cfg).unwrap();
        let d = 3;
        for k in 0..d {
            for m in 0..d {
                for n in 0..d {
                    assert_eq!(b.christoffel.get(k, m, n), b.christoffel.get(k, n, m));
                    for l in 0..d {
                        assert!(
                            (b.riemann.get(k, l, m, n) + b.riemann.get(k, l, n, m)).abs() < 1e-12
                        );
                        let bianchi = b.riemann.get(k, l, m, n)
                            + b.riemann.get(k, m, n, l)
                            + b.riemann.get(k, n, l, m);
                        assert!(bianchi.abs() < 1e-6);
                    }
                }
            }
        }
        assert!((&b.ricci - b.ricci.transpose()).amax() < 1e-6);
    }

    #[test]
    fn flat_diffusion_metric() {
        let m = EnvironmentModel::closed(crate::quantum::OperatorMatrix::pauli_y()).unwrap();
        let x = RealStateVector::from_slice(&[0.5, 0.2, -0.9, 1.1]).unwrap();
        let b = curvature(&x, &m, &GeometryConfig::default()).unwrap();
        assert!(b.christoffel.data.iter().all(|v| v.abs() < 1e-10));
        assert!(b.scalar.abs() < 1e-6);
    }

    #[test]
    fn bundle_json_is_nested() {
        let b = field_curvature(&Sphere(1.0), &[0.1, 0.2], &GeometryConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        assert_eq!(v["christoffel"].as_array().unwrap().len(), 2);
        assert_eq!(v["riemann"][1][0][1].as_array().unwrap().len(), 2);
        assert!((v["scalar"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let bad = GeometryConfig {
            metric_step: 0.0,
            ..GeometryConfig::default()
        };
        assert!(field_christoffel(&Sphere(1.0), &[0.0, 0.0], &bad).is_err());
        assert!(field_christoffel(&Sphere(1.0), &[0.0], &GeometryConfig::default()).is_err());
    }
}
