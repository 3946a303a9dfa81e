//! Modified iterative convex minorant algorithm for the baseline mean
//! function under the full likelihood, with β fixed.
//!
//! Each iteration projects a diagonally scaled gradient step onto the cone
//! `0 ≤ λ₁ ≤ … ≤ λₘ` (weighted isotonic regression, clipped at zero) and
//! then backtracks from the current point toward that candidate until the
//! log-likelihood increases.

use super::{relative_change, FitConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::isotonic::pava_slices;
use crate::likelihood::{full_on_grid, xlogy};
use crate::step::MonotoneStepFunction;

/// Working weight for grid points with no curvature.
const CURVATURE_RIDGE: f64 = 1e-8;
const MIN_STEP: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct IcmOutcome {
    /// Baseline values on `data.grid()`.
    pub values: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Increment {
    left: Option<usize>,
    right: usize,
    dn: f64,
    scale: f64,
}

fn increments(beta: &[f64], data: &Dataset) -> Vec<Increment> {
    let mut out = Vec::with_capacity(data.n_observations());
    for (i, s) in data.subjects().iter().enumerate() {
        let scale = s.linear_predictor(beta).exp();
        let mut left = None;
        for (&g, dn) in data.grid_index(i).iter().zip(s.increments()) {
            out.push(Increment {
                left,
                right: g,
                dn: dn as f64,
                scale,
            });
            left = Some(g);
        }
    }
    out
}

#[inline]
fn delta(inc: &Increment, v: &[f64]) -> f64 {
    v[inc.right] - inc.left.map_or(0.0, |l| v[l])
}

/// Log-likelihood up to the β-only terms, plus gradient and diagonal
/// curvature with respect to the grid values.
fn derivatives(incs: &[Increment], v: &[f64], grad: &mut [f64], curv: &mut [f64]) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    curv.iter_mut().for_each(|c| *c = 0.0);
    let mut ll = 0.0;
    for inc in incs {
        let dl = delta(inc, v);
        ll += xlogy(inc.dn, dl) - inc.scale * dl;
        let (g, c) = if inc.dn > 0.0 {
            (inc.dn / dl - inc.scale, inc.dn / (dl * dl))
        } else {
            (-inc.scale, 0.0)
        };
        grad[inc.right] += g;
        curv[inc.right] += c;
        if let Some(l) = inc.left {
            grad[l] -= g;
            curv[l] += c;
        }
    }
    ll
}

fn partial_loglik(incs: &[Increment], v: &[f64]) -> f64 {
    incs.iter()
        .map(|inc| {
            let dl = delta(inc, v);
            xlogy(inc.dn, dl) - inc.scale * dl
        })
        .sum()
}

fn feasible(incs: &[Increment], trial: &[f64], current: &[f64], floor: f64) -> bool {
    incs.iter().all(|inc| {
        inc.dn == 0.0 || delta(inc, trial) >= floor.min(delta(inc, current)).max(f64::MIN_POSITIVE)
    })
}

pub(crate) fn icm_on_grid(
    beta: &[f64],
    data: &Dataset,
    init: Vec<f64>,
    cfg: &FitConfig,
) -> Result<IcmOutcome> {
    let incs = increments(beta, data);
    let m = data.grid().len();
    let mut v = init;
    let mut grad = vec![0.0; m];
    let mut curv = vec![0.0; m];
    let mut ll = derivatives(&incs, &v, &mut grad, &mut curv);
    if !ll.is_finite() {
        return Err(Error::input(
            "initial baseline is infeasible: an increment with a positive count has zero mean",
        ));
    }
    // β-only terms, added back so reported values match the full likelihood
    let offset = full_on_grid(beta, &v, data) - ll;

    let mut iterations = 0;
    let mut converged = false;
    let mut working = vec![0.0; m];
    let mut trial = vec![0.0; m];
    while iterations < cfg.max_inner {
        iterations += 1;
        let weights: Vec<f64> = curv
            .iter()
            .map(|&c| if c > 0.0 { c } else { CURVATURE_RIDGE })
            .collect();
        for l in 0..m {
            working[l] = v[l] + grad[l] / weights[l];
        }
        let candidate: Vec<f64> = pava_slices(&working, &weights)
            .into_iter()
            .map(|x| x.max(0.0))
            .collect();

        // concavity bounds the attainable gain along the segment by the slope
        let slope: f64 = (0..m).map(|l| grad[l] * (candidate[l] - v[l])).sum();
        if slope <= cfg.eta * (ll + offset).abs() {
            converged = true;
            break;
        }

        let mut alpha = 1.0;
        let accepted = loop {
            for l in 0..m {
                trial[l] = v[l] + alpha * (candidate[l] - v[l]);
            }
            if feasible(&incs, &trial, &v, cfg.delta_floor) {
                let value = partial_loglik(&incs, &trial);
                if value > ll {
                    break Some(value);
                }
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                break None;
            }
        };
        let Some(new_ll) = accepted else {
            return Err(Error::Stagnation {
                iterations,
                loglik: ll + offset,
                slope,
            });
        };

        let change = relative_change(new_ll + offset, ll + offset);
        std::mem::swap(&mut v, &mut trial);
        ll = derivatives(&incs, &v, &mut grad, &mut curv);
        debug_assert!((ll - new_ll).abs() <= 1e-9 * ll.abs().max(1.0));
        if change <= cfg.eta {
            converged = true;
            break;
        }
    }

    Ok(IcmOutcome {
        values: v,
        loglik: ll + offset,
        iterations,
        converged,
    })
}

/// Maximizes the full log-likelihood over baseline step functions with jumps
/// on `data.grid()`, for fixed β, starting from `lambda_init`.
pub fn icm_lambda(
    beta: &[f64],
    data: &Dataset,
    lambda_init: &MonotoneStepFunction,
    cfg: &FitConfig,
) -> Result<MonotoneStepFunction> {
    cfg.validate()?;
    data.check_beta(beta)?;
    let out = icm_on_grid(beta, data, lambda_init.on_grid(data.grid()), cfg)?;
    MonotoneStepFunction::new(data.grid().to_vec(), out.values)
}
