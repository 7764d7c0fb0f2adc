use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qsd_core::analysis::{
    coupling_sweep, critical_coupling, curvature_along_path, find_extrema, scan_field,
    stability_experiment,
};
use qsd_core::dynamics::simulate_trajectory_stream;
use qsd_core::quantum::{bloch_to_state, qubit_hamiltonian};
use qsd_core::verify::run_checks;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command};
use crate::config::RunConfig;
use crate::error::CliError;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (",
    env!("QSD_GIT_DESCRIBE"),
    ")"
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandName {
    Scan,
    Sweep,
    Critical,
    Trajectory,
    Stability,
    Verify,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub command: CommandName,
    pub config: RunConfig,
    pub seed: u64,
    pub version: String,
    pub elapsed_seconds: f64,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (name, cfg) = match cli.command {
        Command::Scan(a) => (CommandName::Scan, a.resolve()?),
        Command::Sweep(a) => (CommandName::Sweep, a.resolve()?),
        Command::Critical(a) => (CommandName::Critical, a.resolve()?),
        Command::Trajectory(a) => (CommandName::Trajectory, a.resolve()?),
        Command::Stability(a) => (CommandName::Stability, a.resolve()?),
        Command::Verify(a) => (CommandName::Verify, a.resolve()?),
        Command::Replay(a) => {
            let text =
                fs::read_to_string(&a.sidecar).map_err(|e| CliError::Io(a.sidecar.clone(), e))?;
            let side: Sidecar = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", a.sidecar.display())))?;
            let mut cfg = side.config;
            if let Some(out) = a.out {
                cfg.out = out;
            }
            if a.threads.is_some() {
                cfg.threads = a.threads;
            }
            (side.command, cfg)
        }
    };
    run(name, &cfg)
}

fn run(name: CommandName, cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let start = Instant::now();
    let sidecar_dir = match name {
        CommandName::Scan => scan(cfg)?,
        CommandName::Sweep => sweep(cfg)?,
        CommandName::Critical => critical(cfg)?,
        CommandName::Trajectory => trajectory(cfg)?,
        CommandName::Stability => stability(cfg)?,
        CommandName::Verify => verify(cfg)?,
    };
    let side = Sidecar {
        command: name,
        config: cfg.clone(),
        seed: cfg.seed,
        version: VERSION.to_string(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    let path = sidecar_dir.join("run.json");
    let text = serde_json::to_string_pretty(&side).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::Io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn scan(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let model = cfg.model()?;
    let field = scan_field(&model, &cfg.grid(), cfg.quantity, &cfg.geometry())?;
    let (file, dir) = cfg.artifact("scan.csv");
    field.write_csv(create(&file)?)?;
    let ext = find_extrema(&field)?;
    println!(
        "max {:.6} at (theta {:.4}, phi {:.4}); min {:.6} at (theta {:.4}, phi {:.4})",
        ext.max_value,
        ext.max_point.theta,
        ext.max_point.phi,
        ext.min_value,
        ext.min_point.theta,
        ext.min_point.phi
    );
    println!("wrote {}", file.display());
    Ok(dir)
}

fn sweep(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let points = cfg.sweep_points()?;
    let result = coupling_sweep(cfg.kind, &points, &cfg.grid(), &cfg.geometry())?;
    let (file, dir) = cfg.artifact("sweep.csv");
    result.write_csv(create(&file)?)?;
    println!("wrote {}", file.display());
    Ok(dir)
}

#[derive(Serialize)]
struct CriticalOutput {
    kind: qsd_core::EnvironmentKind,
    lo: f64,
    hi: f64,
    tol: f64,
    critical_coupling: f64,
}

fn critical(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let mu = critical_coupling(
        cfg.kind,
        cfg.lo,
        cfg.hi,
        cfg.tol,
        &cfg.grid(),
        &cfg.geometry(),
    )?;
    println!("{mu}");
    let (file, dir) = cfg.artifact("critical.json");
    let out = CriticalOutput {
        kind: cfg.kind,
        lo: cfg.lo,
        hi: cfg.hi,
        tol: cfg.tol,
        critical_coupling: mu,
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(&file, &(text + "\n"))?;
    Ok(dir)
}

fn trajectory(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let model = cfg.model()?;
    let start = bloch_to_state(&cfg.start()?);
    let record = simulate_trajectory_stream(&start, &model, &cfg.sde(), cfg.stream)?;
    let (file, dir) = cfg.artifact("trajectory.csv");
    record.write_csv(create(&file)?)?;
    println!("wrote {} ({} records)", file.display(), record.len());
    if cfg.path_curvature {
        let values = curvature_along_path(&record, &model, &cfg.geometry())?;
        let stem = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let path = file.with_file_name(format!("{stem}_curvature.csv"));
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["t", "scalar_curvature"])
            .map_err(qsd_core::Error::from)?;
        for (t, r) in record.times.iter().zip(&values) {
            w.write_record([t.to_string(), r.to_string()])
                .map_err(qsd_core::Error::from)?;
        }
        w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
        println!("wrote {}", path.display());
    }
    Ok(dir)
}

fn stability(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let h = qubit_hamiltonian(cfg.hx, cfg.hy, cfg.hz);
    let report = stability_experiment(cfg.kind, cfg.couplings(), &h, &cfg.stability())?;
    let (file, dir) = cfg.artifact("stability.json");
    write_text(&file, &(report.to_json()? + "\n"))?;
    println!(
        "{:?}: resident fraction {:.4} (threshold {}), launched at (theta {:.4}, phi {:.4})",
        report.verdict,
        report.fraction_resident,
        report.threshold,
        report.max_point.theta,
        report.max_point.phi
    );
    println!("wrote {}", file.display());
    Ok(dir)
}

fn verify(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let outcomes = run_checks();
    for c in &outcomes {
        println!(
            "{} {:<28} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let (file, dir) = cfg.artifact("verify.json");
    let text =
        serde_json::to_string_pretty(&outcomes).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(&file, &(text + "\n"))?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(dir)
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}
