use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{simulate_with_observer, SdeConfig};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::quantum::{DensityMatrix, EnvironmentModel, QuantumState};
use crate::serde_complex::{matrix_to_pairs, Pairs};

/// Trajectories per work unit; partial sums are combined in unit order so the
/// result does not depend on the thread count.
const CHUNK: usize = 64;

/// Runs `job(k)` for `k in 0..n` in parallel and returns the results in index
/// order. Failures are collected into [`Error::EnsembleFailed`].
pub fn run_indexed<T, F>(n: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..n as u64).into_par_iter().map(&job).collect();
    let mut ok = Vec::with_capacity(n);
    let mut failed = Vec::new();
    let mut first = None;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failed.push(k as u64);
                first.get_or_insert(e);
            }
        }
    }
    match first {
        None => Ok(ok),
        Some(e) => Err(Error::EnsembleFailed {
            total: n,
            failed,
            first: Box::new(e),
        }),
    }
}

/// Mean projector on the recording grid with per-entry standard errors.
///
/// `stderr[k][(i, j)]` holds the standard error of the real part in `re` and
/// of the imaginary part in `im`.
#[derive(Debug, Clone)]
pub struct EnsembleDensity {
    pub times: Vec<f64>,
    pub rho: Vec<DensityMatrix>,
    pub stderr: Vec<CMatrix>,
    pub n_traj: usize,
}

#[derive(Serialize)]
struct EnsembleRepr<'a> {
    times: &'a [f64],
    rho: Vec<Pairs>,
    stderr: Vec<Pairs>,
    n_traj: usize,
}

impl EnsembleDensity {
    pub fn to_json(&self) -> Result<String> {
        let repr = EnsembleRepr {
            times: &self.times,
            rho: self
                .rho
                .iter()
                .map(|r| matrix_to_pairs(r.matrix()))
                .collect(),
            stderr: self.stderr.iter().map(matrix_to_pairs).collect(),
            n_traj: self.n_traj,
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }
}

#[derive(Clone)]
struct Moments {
    sum: Vec<CMatrix>,
    sq: Vec<CMatrix>,
}

impl Moments {
    fn zeros(records: usize, n: usize) -> Self {
        Self {
            sum: vec![CMatrix::zeros(n, n); records],
            sq: vec![CMatrix::zeros(n, n); records],
        }
    }

    fn add(&mut self, other: &Moments) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sq.iter_mut().zip(&other.sq) {
            *a += b;
        }
    }
}

/// Averages `|psi(t)><psi(t)|` over `n_traj` trajectories on streams `0..n_traj`.
pub fn ensemble_density(
    state0: &QuantumState,
    model: &EnvironmentModel,
    config: &SdeConfig,
    n_traj: usize,
) -> Result<EnsembleDensity> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("n_traj must be at least 1".into()));
    }
    config.validate()?;
    let n = model.dim();
    let records = config.steps / config.record_stride + 1;
    let chunks = n_traj.div_ceil(CHUNK);
    let partial = run_indexed(chunks, |c| {
        let lo = c as usize * CHUNK;
        let hi = (lo + CHUNK).min(n_traj);
        let mut acc = Moments::zeros(records, n);
        let mut failures = Vec::new();
        for k in lo..hi {
            let mut slot = 0;
            let r = simulate_with_observer(state0, model, config, k as u64, |_, _, psi| {
                for i in 0..n {
                    for j in 0..n {
                        let z = psi[i] * psi[j].conj();
                        acc.sum[slot][(i, j)] += z;
                        acc.sq[slot][(i, j)] += C64::new(z.re * z.re, z.im * z.im);
                    }
                }
                slot += 1;
                ControlFlow::Continue(())
            });
            if let Err(e) = r {
                failures.push((k as u64, e));
            }
        }
        Ok((acc, failures))
    })?;

    let mut total = Moments::zeros(records, n);
    let mut failed = Vec::new();
    let mut first = None;
    for (acc, failures) in partial {
        total.add(&acc);
        for (k, e) in failures {
            failed.push(k);
            first.get_or_insert(e);
        }
    }
    if let Some(e) = first {
        return Err(Error::EnsembleFailed {
            total: n_traj,
            failed,
            first: Box::new(e),
        });
    }

    let nf = n_traj as f64;
    let times = (0..records)
        .map(|r| (r * config.record_stride) as f64 * config.dt)
        .collect();
    let rho = total
        .sum
        .iter()
        .map(|s| DensityMatrix::from_matrix_unchecked(s / C64::new(nf, 0.0)))
        .collect();
    let stderr = total
        .sum
        .iter()
        .zip(&total.sq)
        .map(|(s, q)| {
            s.zip_map(q, |s, q| {
                if n_traj < 2 {
                    return C64::new(0.0, 0.0);
                }
                let var = |sum: f64, sq: f64| ((sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
                C64::new((var(s.re, q.re) / nf).sqrt(), (var(s.im, q.im) / nf).sqrt())
            })
        })
        .collect();
    Ok(EnsembleDensity {
        times,
        rho,
        stderr,
        n_traj,
    })
}
