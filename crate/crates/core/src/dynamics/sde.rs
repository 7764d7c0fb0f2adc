use std::io::Write;
use std::ops::ControlFlow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::kernel::SdeKernel;
use crate::dynamics::noise::{fill_wiener, trajectory_rng, NoiseIncrement};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::quantum::{bloch_vector, EnvironmentModel, QuantumState};

/// Below this norm an unnormalized step is treated as a failure.
pub const NORM_FLOOR: f64 = 1e-8;

/// Coefficients of the bracket in the drift.
///
/// `GisinPercival` uses `<L^dag> L - L^dag L / 2 - |<L>|^2 / 2`; its ensemble
/// average obeys the Lindblad equation. `Unhalved` doubles every term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftConvention {
    #[default]
    GisinPercival,
    Unhalved,
}

impl std::str::FromStr for DriftConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gisin_percival" => Ok(Self::GisinPercival),
            "unhalved" => Ok(Self::Unhalved),
            other => Err(Error::InvalidParameter(format!(
                "unknown drift convention `{other}`"
            ))),
        }
    }
}

/// Euler–Maruyama settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdeConfig {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub renormalize_each_step: bool,
    pub record_stride: usize,
    pub convention: DriftConvention,
}

impl Default for SdeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            steps: 1000,
            seed: 20_240_601,
            renormalize_each_step: true,
            record_stride: 1,
            convention: DriftConvention::GisinPercival,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter(
                "record_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn t_final(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

fn check_model(state: &QuantumState, model: &EnvironmentModel) -> Result<()> {
    if state.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: state.dim(),
        });
    }
    Ok(())
}

fn eval(
    state: &QuantumState,
    model: &EnvironmentModel,
    convention: DriftConvention,
) -> (CVector, CMatrix) {
    let kernel = SdeKernel::new(model, convention);
    let (n, m) = (kernel.n, kernel.m);
    let mut f = CVector::zeros(n);
    let mut b = CMatrix::zeros(n, m);
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    kernel.eval(
        state.amplitudes().as_slice(),
        f.as_mut_slice(),
        b.as_mut_slice(),
        &mut scratch,
    );
    (f, b)
}

/// Drift vector `f` of `d psi = f dt + B dW`.
pub fn drift(
    state: &QuantumState,
    model: &EnvironmentModel,
    convention: DriftConvention,
) -> Result<CVector> {
    check_model(state, model)?;
    state.require_normalized()?;
    Ok(eval(state, model, convention).0)
}

/// Columns `(L_l - <L_l>) psi`.
pub fn diffusion_columns(state: &QuantumState, model: &EnvironmentModel) -> Result<CMatrix> {
    check_model(state, model)?;
    state.require_normalized()?;
    Ok(eval(state, model, DriftConvention::GisinPercival).1)
}

/// One Euler–Maruyama step with noise drawn from `rng`.
///
/// Expectations are taken with the normalized state, so chains of
/// unrenormalized steps remain well defined.
pub fn em_step<R: Rng + ?Sized>(
    state: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    rng: &mut R,
) -> Result<QuantumState> {
    let mut w = CVector::zeros(model.channels());
    fill_wiener(w.as_mut_slice(), (0.5 * config.dt).sqrt(), rng);
    em_step_with_noise(state, model, config, &NoiseIncrement { values: w })
}

/// Euler–Maruyama step with an explicit increment.
pub fn em_step_with_noise(
    state: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    noise: &NoiseIncrement,
) -> Result<QuantumState> {
    check_model(state, model)?;
    if noise.len() != model.channels() {
        return Err(Error::DimensionMismatch {
            expected: model.channels(),
            found: noise.len(),
        });
    }
    let mut it = Integrator::new(model, state, config.convention);
    it.w.copy_from_slice(noise.values.as_slice());
    it.apply(config.dt, config.renormalize_each_step)
        .map_err(|norm| Error::StepFailure { step: 0, norm })?;
    Ok(QuantumState::from_vector_unchecked(it.psi))
}

/// Reusable buffers for stepping one trajectory.
pub(crate) struct Integrator {
    kernel: SdeKernel,
    pub psi: CVector,
    f: Vec<C64>,
    b: Vec<C64>,
    scratch: Vec<C64>,
    w: Vec<C64>,
}

impl Integrator {
    pub fn new(
        model: &EnvironmentModel,
        state: &QuantumState,
        convention: DriftConvention,
    ) -> Self {
        let kernel = SdeKernel::new(model, convention);
        let (n, m) = (kernel.n, kernel.m);
        Self {
            kernel,
            psi: state.amplitudes().clone(),
            f: vec![C64::new(0.0, 0.0); n],
            b: vec![C64::new(0.0, 0.0); n * m],
            scratch: vec![C64::new(0.0, 0.0); n],
            w: vec![C64::new(0.0, 0.0); m],
        }
    }

    /// Draws fresh noise and advances; `Err` carries the norm on underflow.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        dt: f64,
        renormalize: bool,
        rng: &mut R,
    ) -> std::result::Result<(), f64> {
        fill_wiener(&mut self.w, (0.5 * dt).sqrt(), rng);
        self.apply(dt, renormalize)
    }

    fn apply(&mut self, dt: f64, renormalize: bool) -> std::result::Result<(), f64> {
        let n = self.kernel.n;
        let psi = self.psi.as_mut_slice();
        self.kernel
            .eval(psi, &mut self.f, &mut self.b, &mut self.scratch);
        for (p, f) in psi.iter_mut().zip(&self.f) {
            *p += f * dt;
        }
        for (col, w) in self.b.chunks_exact(n).zip(&self.w) {
            for (p, b) in psi.iter_mut().zip(col) {
                *p += b * w;
            }
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm >= NORM_FLOOR) {
            return Err(norm);
        }
        if renormalize {
            let inv = 1.0 / norm;
            for z in psi.iter_mut() {
                *z *= inv;
            }
        }
        Ok(())
    }
}

/// Recorded sample path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub norms: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV `t,re_c0,im_c0,...,norm` plus `sx,sy,sz` for qubits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let n = self.states.first().map_or(0, |s| s.dim());
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for i in 0..n {
            header.push(format!("re_c{i}"));
            header.push(format!("im_c{i}"));
        }
        header.push("norm".into());
        if n == 2 {
            header.extend(["sx", "sy", "sz"].map(String::from));
        }
        w.write_record(&header)?;
        for ((t, s), norm) in self.times.iter().zip(&self.states).zip(&self.norms) {
            let mut row = vec![t.to_string()];
            for z in s.amplitudes().iter() {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            row.push(norm.to_string());
            if n == 2 {
                row.extend(bloch_vector(s)?.iter().map(|v| v.to_string()));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs one trajectory on stream `stream`, calling `observe(step, t, psi)` at
/// step 0 and every `record_stride`-th step. Returning `Break` stops the run;
/// the number of completed steps is returned.
pub fn simulate_with_observer<F>(
    state0: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    stream: u64,
    mut observe: F,
) -> Result<usize>
where
    F: FnMut(usize, f64, &CVector) -> ControlFlow<()>,
{
    config.validate()?;
    check_model(state0, model)?;
    state0.require_normalized()?;
    let mut rng = trajectory_rng(config.seed, stream);
    let mut it = Integrator::new(model, state0, config.convention);
    if observe(0, 0.0, &it.psi).is_break() {
        return Ok(0);
    }
    for k in 1..=config.steps {
        it.step(config.dt, config.renormalize_each_step, &mut rng)
            .map_err(|norm| Error::StepFailure { step: k, norm })?;
        if k % config.record_stride == 0 && observe(k, k as f64 * config.dt, &it.psi).is_break() {
            return Ok(k);
        }
    }
    Ok(config.steps)
}

/// Trajectory on stream 0 of `config.seed`.
pub fn simulate_trajectory(
    state0: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
) -> Result<TrajectoryRecord> {
    simulate_trajectory_stream(state0, model, config, 0)
}

pub fn simulate_trajectory_stream(
    state0: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    stream: u64,
) -> Result<TrajectoryRecord> {
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        norms: Vec::new(),
        seed: config.seed,
        stream,
    };
    simulate_with_observer(state0, model, config, stream, |_, t, psi| {
        let s = QuantumState::from_vector_unchecked(psi.clone());
        rec.times.push(t);
        rec.norms.push(s.norm());
        rec.states.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(rec)
}
