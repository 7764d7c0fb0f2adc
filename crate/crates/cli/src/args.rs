use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qsd_core::analysis::Quantity;
use qsd_core::dynamics::DriftConvention;
use qsd_core::geometry::ColumnConvention;
use qsd_core::quantum::EnvironmentKind;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qsd",
    version,
    about = "Quantum state diffusion and diffusion-metric curvature on the Bloch sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norm or scalar-curvature landscape on a Bloch grid (CSV: theta,phi,value).
    Scan(ScanArgs),
    /// Extremal curvature over a range of couplings (CSV: coupling,max_curvature,min_curvature).
    Sweep(SweepArgs),
    /// Coupling at which the maximal curvature changes sign.
    Critical(CriticalArgs),
    /// One sample path of the state diffusion equation.
    Trajectory(TrajectoryArgs),
    /// Residency of paths launched at the curvature maximum.
    Stability(StabilityArgs),
    /// Fast numerical self-checks.
    Verify(CommonArgs),
    /// Re-run the command recorded in a run.json sidecar.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON file with run settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (with extension) or directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub kind: Option<EnvironmentKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<f64>,
    /// Hamiltonian `hx sigma_x + hy sigma_y + hz sigma_z`.
    #[arg(long, allow_hyphen_values = true)]
    pub hx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Square grid size; `--n-theta` and `--n-phi` override each axis.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Metric columns: `shifted` or `centered`.
    #[arg(long)]
    pub columns: Option<ColumnConvention>,
    #[arg(long)]
    pub metric_step: Option<f64>,
    #[arg(long)]
    pub christoffel_step: Option<f64>,
    /// Disable Richardson extrapolation of the finite differences.
    #[arg(long)]
    pub no_richardson: bool,
}

#[derive(Debug, Args)]
pub struct SdeArgs {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record every n-th step.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Drift convention: `gisin_percival` or `unhalved`.
    #[arg(long)]
    pub convention: Option<DriftConvention>,
    #[arg(long)]
    pub no_renormalize: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// `norm` or `curvature`.
    #[arg(long)]
    pub quantity: Option<Quantity>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sde: SdeArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Noise stream of the path.
    #[arg(long)]
    pub stream: Option<u64>,
    /// Also write the scalar curvature along the path.
    #[arg(long)]
    pub path_curvature: bool,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sde: SdeArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Residency radius in radians.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A run.json written by an earlier run.
    pub sidecar: PathBuf,
    /// Write the artifacts here instead of the recorded location.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl CommonArgs {
    /// File values first, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        Ok(cfg)
    }
}

impl ModelArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.kind, self.kind);
        if self.mu.is_some() {
            c.mu = self.mu;
        }
        if self.mu1.is_some() {
            c.mu1 = self.mu1;
        }
        if self.mu2.is_some() {
            c.mu2 = self.mu2;
        }
        set(&mut c.hx, self.hx);
        set(&mut c.hy, self.hy);
        set(&mut c.hz, self.hz);
    }
}

impl GeometryArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.n_theta, self.grid);
        set(&mut c.n_phi, self.grid);
        set(&mut c.n_theta, self.n_theta);
        set(&mut c.n_phi, self.n_phi);
        set(&mut c.columns, self.columns);
        set(&mut c.metric_step, self.metric_step);
        set(&mut c.christoffel_step, self.christoffel_step);
        if self.no_richardson {
            c.richardson = false;
        }
    }
}

impl SdeArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        set(&mut c.dt, self.dt);
        set(&mut c.steps, self.steps);
        set(&mut c.seed, self.seed);
        set(&mut c.record_stride, self.stride);
        set(&mut c.convention, self.convention);
        if self.no_renormalize {
            c.renormalize = false;
        }
    }
}

impl ScanArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.common.resolve()?;
        self.model.apply(&mut c);
        self.geometry.apply(&mut c);
        set(&mut c.quantity, self.quantity);
        Ok(c)
    }
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.common.resolve()?;
        self.model.apply(&mut c);
        self.geometry.apply(&mut c);
        set(&mut c.sweep_from, self.from);
        set(&mut c.sweep_to, self.to);
        set(&mut c.sweep_count, self.count);
        Ok(c)
    }
}

impl CriticalArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.common.resolve()?;
        self.model.apply(&mut c);
        self.geometry.apply(&mut c);
        set(&mut c.lo, self.lo);
        set(&mut c.hi, self.hi);
        set(&mut c.tol, self.tol);
        Ok(c)
    }
}

impl TrajectoryArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.common.resolve()?;
        self.model.apply(&mut c);
        self.sde.apply(&mut c);
        self.geometry.apply(&mut c);
        set(&mut c.theta, self.theta);
        set(&mut c.phi, self.phi);
        set(&mut c.stream, self.stream);
        if self.path_curvature {
            c.path_curvature = true;
        }
        Ok(c)
    }
}

impl StabilityArgs {
    /// Starts from the stability defaults (long horizon, sparse recording)
    /// unless a config file supplies its own.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.common.resolve()?;
        if self.common.config.is_none() {
            let d = qsd_core::analysis::StabilityConfig::default().sde;
            c.steps = d.steps;
            c.record_stride = d.record_stride;
        }
        self.model.apply(&mut c);
        self.sde.apply(&mut c);
        self.geometry.apply(&mut c);
        set(&mut c.n_paths, self.paths);
        set(&mut c.delta, self.delta);
        set(&mut c.threshold, self.threshold);
        Ok(c)
    }
}
