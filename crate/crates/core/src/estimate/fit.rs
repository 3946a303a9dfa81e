use nalgebra::DMatrix;

use super::{icm_on_grid, newton_on_grid, relative_change, FitConfig, FitResult, Method};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::isotonic::{profile_blocks, Block};
use crate::likelihood::{full_on_grid, pseudo_on_grid, Criterion};
use crate::step::MonotoneStepFunction;

/// Smallest eigenvalue of the profile information, relative to the largest,
/// below which β is reported as not identifiable.
const IDENTIFIABILITY_RTOL: f64 = 1e-10;

fn check_inputs(data: &Dataset, beta_init: &[f64], cfg: &FitConfig) -> Result<()> {
    cfg.validate()?;
    data.check_beta(beta_init)?;
    if beta_init.iter().any(|b| b.abs() > cfg.beta_box) {
        return Err(Error::input("beta_init lies outside the parameter box"));
    }
    if data.total_count() == 0 {
        return Err(Error::NonIdentifiable(
            "no events were observed, so beta is unbounded".into(),
        ));
    }
    let first = data.subjects()[0].z();
    for j in 0..data.dim() {
        if data.subjects().iter().all(|s| s.z()[j] == first[j]) {
            return Err(Error::NonIdentifiable(format!(
                "covariate {} is constant, so it is confounded with the baseline",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Negated Hessian of the profile pseudo-likelihood in β.
///
/// On each constant block of the isotonic fit the profile baseline equals
/// pooled count over pooled `exp(βᵀz)`, so the profile curvature is the
/// block count times the `exp(βᵀz)`-weighted covariance of z in the block.
fn profile_information(beta: &[f64], data: &Dataset, blocks: &[Block]) -> DMatrix<f64> {
    let d = data.dim();
    let m = data.grid().len();
    let mut block_of = vec![0; m];
    for (b, blk) in blocks.iter().enumerate() {
        block_of[blk.start..blk.end].iter_mut().for_each(|x| *x = b);
    }
    let nb = blocks.len();
    let mut w0 = vec![0.0; nb];
    let mut w1 = vec![vec![0.0; d]; nb];
    let mut w2 = vec![DMatrix::<f64>::zeros(d, d); nb];
    let mut count = vec![0.0; nb];
    for (i, s) in data.subjects().iter().enumerate() {
        let w = s.linear_predictor(beta).exp();
        let z = s.z();
        for (&g, &n) in data.grid_index(i).iter().zip(s.counts()) {
            let b = block_of[g];
            w0[b] += w;
            count[b] += n as f64;
            for j in 0..d {
                w1[b][j] += w * z[j];
                for k in 0..d {
                    w2[b][(j, k)] += w * z[j] * z[k];
                }
            }
        }
    }
    let mut info = DMatrix::zeros(d, d);
    for b in 0..nb {
        if count[b] == 0.0 {
            continue;
        }
        for j in 0..d {
            for k in 0..d {
                let cov = w2[b][(j, k)] / w0[b] - w1[b][j] * w1[b][k] / (w0[b] * w0[b]);
                info[(j, k)] += count[b] * cov;
            }
        }
    }
    info
}

fn check_identifiable(info: &DMatrix<f64>) -> Result<()> {
    let eig = info.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().copied().fold(0.0, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= IDENTIFIABILITY_RTOL * max {
        return Err(Error::NonIdentifiable(format!(
            "profile likelihood is flat along some direction (eigenvalues {min:e} .. {max:e})"
        )));
    }
    Ok(())
}

/// Maximum pseudo-likelihood estimate.
///
/// Alternates the closed-form profile step for Λ with Newton–Raphson for β
/// until the relative change of the pseudo log-likelihood is at most
/// `cfg.eta`.
pub fn fit_mple(data: &Dataset, beta_init: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    check_inputs(data, beta_init, cfg)?;
    let shift = data.covariate_means();
    let centered = data.shifted(&shift);
    let fit = mple_core(&centered, beta_init, cfg)?;
    uncenter(fit, &shift)
}

/// Shifting covariates by c leaves β and the likelihood unchanged and
/// multiplies Λ by exp(βᵀc). The alternating iterations are run on centered
/// covariates, where the β and Λ-level directions are far less coupled.
fn uncenter(mut fit: FitResult, shift: &[f64]) -> Result<FitResult> {
    let factor = (-fit.beta.iter().zip(shift).map(|(b, c)| b * c).sum::<f64>()).exp();
    fit.lambda = fit.lambda.scaled(factor);
    Ok(fit)
}

fn recenter(lambda: &MonotoneStepFunction, beta: &[f64], shift: &[f64]) -> MonotoneStepFunction {
    lambda.scaled(beta.iter().zip(shift).map(|(b, c)| b * c).sum::<f64>().exp())
}

fn mple_core(data: &Dataset, beta_init: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    let mut beta = beta_init.to_vec();
    let (mut blocks, mut values) = profile_blocks(&beta, data)?;
    let mut ll = pseudo_on_grid(&beta, &values, data);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut outer = 0;

    while outer < cfg.max_outer {
        outer += 1;
        beta = newton_on_grid(Criterion::Pseudo, &values, data, &beta, cfg)?;
        (blocks, values) = profile_blocks(&beta, data)?;
        let next = pseudo_on_grid(&beta, &values, data);
        trace.push(next);
        let change = relative_change(next, ll);
        ll = next;
        if change <= cfg.eta {
            converged = true;
            break;
        }
    }

    check_identifiable(&profile_information(&beta, data, &blocks))?;

    Ok(FitResult {
        method: Method::Mple,
        beta,
        lambda: MonotoneStepFunction::new(data.grid().to_vec(), values)?,
        loglik: ll,
        outer_iters: outer,
        converged,
        trace,
    })
}

/// Starting baseline for the likelihood iterations: the pseudo-likelihood
/// step function interpolated linearly between its jump points (from the
/// origin), evaluated on the grid and kept strictly increasing by at least
/// `cfg.delta_floor` per grid step.
pub fn mle_warm_start(data: &Dataset, pseudo: &MonotoneStepFunction, cfg: &FitConfig) -> Vec<f64> {
    let mut knots = vec![(0.0, 0.0)];
    let mut last = 0.0;
    for (&t, &v) in pseudo.jumps().iter().zip(pseudo.values()) {
        if v > last {
            knots.push((t, v));
            last = v;
        }
    }
    let mut prev = 0.0;
    data.grid()
        .iter()
        .map(|&t| {
            let pos = knots.partition_point(|k| k.0 <= t);
            let v = if pos == knots.len() {
                knots[pos - 1].1
            } else {
                let (t0, v0) = knots[pos - 1];
                let (t1, v1) = knots[pos];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            };
            prev = v.max(prev + cfg.delta_floor);
            prev
        })
        .collect()
}

/// Maximum likelihood estimate from a precomputed pseudo-likelihood fit.
pub fn fit_mle_from(data: &Dataset, pseudo: &FitResult, cfg: &FitConfig) -> Result<FitResult> {
    check_inputs(data, &pseudo.beta, cfg)?;
    let shift = data.covariate_means();
    let centered = data.shifted(&shift);
    let start = recenter(&pseudo.lambda, &pseudo.beta, &shift);
    let fit = mle_core(&centered, &pseudo.beta, &start, cfg)?;
    uncenter(fit, &shift)
}

fn mle_core(
    data: &Dataset,
    beta_init: &[f64],
    pseudo_lambda: &MonotoneStepFunction,
    cfg: &FitConfig,
) -> Result<FitResult> {
    let mut beta = beta_init.to_vec();
    let mut values = mle_warm_start(data, pseudo_lambda, cfg);
    let mut ll = full_on_grid(&beta, &values, data);
    if !ll.is_finite() {
        return Err(Error::Numerical("warm start has -inf likelihood".into()));
    }
    let mut trace = vec![ll];
    let mut converged = false;
    let mut outer = 0;

    while outer < cfg.max_outer {
        outer += 1;
        values = icm_on_grid(&beta, data, values, cfg)?.values;
        beta = newton_on_grid(Criterion::Full, &values, data, &beta, cfg)?;
        let next = full_on_grid(&beta, &values, data);
        trace.push(next);
        let change = relative_change(next, ll);
        ll = next;
        if change <= cfg.eta {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        method: Method::Mle,
        beta,
        lambda: MonotoneStepFunction::new(data.grid().to_vec(), values)?,
        loglik: ll,
        outer_iters: outer,
        converged,
        trace,
    })
}

/// Maximum likelihood estimate, warm-started from the pseudo-likelihood
/// estimate computed from β = 0.
pub fn fit_mle(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    let pseudo = fit_mple(data, &vec![0.0; data.dim()], cfg)?;
    fit_mle_from(data, &pseudo, cfg)
}

/// Fits with either method, starting the pseudo-likelihood iterations at
/// `beta_init`.
pub fn fit(data: &Dataset, method: Method, beta_init: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    let pseudo = fit_mple(data, beta_init, cfg)?;
    match method {
        Method::Mple => Ok(pseudo),
        Method::Mle => fit_mle_from(data, &pseudo, cfg),
    }
}
