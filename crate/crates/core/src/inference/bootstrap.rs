use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{fit, FitConfig, Method};

pub const DEFAULT_REPLICATES: usize = 200;
/// Largest tolerated fraction of failed replicates.
pub const MAX_FAILED_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub se: Vec<f64>,
    pub cov: DMatrix<f64>,
    /// Estimates from the successful replicates, in replicate order.
    pub replicates: Vec<Vec<f64>>,
    pub failed: usize,
}

/// Subject indices drawn with replacement for replicate `b`.
///
/// Each replicate reads its own ChaCha stream, so draws do not depend on
/// how replicates are scheduled.
pub fn resample_indices(n: usize, seed: u64, b: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Nonparametric bootstrap of an arbitrary estimator over whole subjects.
///
/// `estimator` returns `None` (or an error) for a failed replicate.
pub fn bootstrap_with<F>(data: &Dataset, replicates: usize, seed: u64, estimator: F) -> Result<BootstrapResult>
where
    F: Fn(&Dataset) -> Result<Option<Vec<f64>>> + Sync,
{
    if replicates < 2 {
        return Err(Error::input("bootstrap needs at least 2 replicates"));
    }
    let n = data.len();
    let outcomes: Vec<Option<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let sample = data.resample(&resample_indices(n, seed, b)).ok()?;
            estimator(&sample).ok().flatten()
        })
        .collect();
    let reps: Vec<Vec<f64>> = outcomes.into_iter().flatten().collect();
    let failed = replicates - reps.len();
    if failed as f64 > MAX_FAILED_FRACTION * replicates as f64 {
        return Err(Error::Inference(format!(
            "{failed} of {replicates} bootstrap replicates failed"
        )));
    }
    if reps.len() < 2 {
        return Err(Error::Inference("fewer than 2 successful bootstrap replicates".into()));
    }
    let cov = sample_covariance(&reps);
    let se = cov.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(BootstrapResult {
        se,
        cov,
        replicates: reps,
        failed,
    })
}

/// Bootstrap standard errors of either estimator.
///
/// Replicates start from the full-data estimate; a replicate fails if its
/// fit errors or stops at an iteration cap.
pub fn bootstrap_se(
    data: &Dataset,
    method: Method,
    replicates: usize,
    seed: u64,
    cfg: &FitConfig,
) -> Result<BootstrapResult> {
    let point = fit(data, method, &vec![0.0; data.dim()], cfg)?;
    bootstrap_with(data, replicates, seed, |sample| {
        let r = fit(sample, method, &point.beta, cfg)?;
        Ok(r.converged.then_some(r.beta))
    })
}

/// Sample covariance with the `n − 1` denominator.
pub fn sample_covariance(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = DMatrix::zeros(d, d);
    for r in rows {
        for j in 0..d {
            for k in 0..=j {
                cov[(j, k)] += (r[j] - mean[j]) * (r[k] - mean[k]);
            }
        }
    }
    for j in 0..d {
        for k in 0..=j {
            cov[(j, k)] /= (n - 1) as f64;
            cov[(k, j)] = cov[(j, k)];
        }
    }
    cov
}
