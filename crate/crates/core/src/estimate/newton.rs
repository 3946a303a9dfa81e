use nalgebra::{DMatrix, DVector};

use super::FitConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::likelihood::{self, Criterion};
use crate::step::MonotoneStepFunction;

/// The β-part of either criterion with Λ held fixed reduces to a Poisson
/// regression: `Σᵢ sᵢ βᵀzᵢ − exp(βᵀzᵢ) aᵢ`. For the pseudo criterion sᵢ and
/// aᵢ sum counts and Λ over all of subject i's times; for the full criterion
/// the increments telescope to the last inspection time.
struct BetaObjective<'a> {
    z: Vec<&'a [f64]>,
    s: Vec<f64>,
    a: Vec<f64>,
    dim: usize,
}

impl<'a> BetaObjective<'a> {
    fn new(criterion: Criterion, values: &[f64], data: &'a Dataset) -> Self {
        let mut z = Vec::with_capacity(data.len());
        let mut s = Vec::with_capacity(data.len());
        let mut a = Vec::with_capacity(data.len());
        for (i, subj) in data.subjects().iter().enumerate() {
            let idx = data.grid_index(i);
            let counts = subj.counts();
            let (si, ai) = match criterion {
                Criterion::Pseudo => (
                    counts.iter().map(|&c| c as f64).sum(),
                    idx.iter().map(|&g| values[g]).sum(),
                ),
                Criterion::Full => (
                    *counts.last().unwrap() as f64,
                    values[*idx.last().unwrap()],
                ),
            };
            z.push(subj.z());
            s.push(si);
            a.push(ai);
        }
        BetaObjective { z, s, a, dim: data.dim() }
    }

    fn value(&self, beta: &[f64]) -> f64 {
        self.z
            .iter()
            .zip(self.s.iter().zip(&self.a))
            .map(|(z, (s, a))| {
                let eta: f64 = z.iter().zip(beta).map(|(x, b)| x * b).sum();
                s * eta - eta.exp() * a
            })
            .sum()
    }

    fn gradient_hessian(&self, beta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim;
        let mut grad = DVector::zeros(d);
        // accumulates the negated Hessian
        let mut info = DMatrix::zeros(d, d);
        for (z, (s, a)) in self.z.iter().zip(self.s.iter().zip(&self.a)) {
            let eta: f64 = z.iter().zip(beta).map(|(x, b)| x * b).sum();
            let mu = eta.exp() * a;
            for j in 0..d {
                grad[j] += (s - mu) * z[j];
                for k in 0..=j {
                    info[(j, k)] += mu * z[j] * z[k];
                }
            }
        }
        for j in 0..d {
            for k in 0..j {
                info[(k, j)] = info[(j, k)];
            }
        }
        (grad, info)
    }
}

pub(crate) fn newton_on_grid(
    criterion: Criterion,
    values: &[f64],
    data: &Dataset,
    beta_init: &[f64],
    cfg: &FitConfig,
) -> Result<Vec<f64>> {
    let obj = BetaObjective::new(criterion, values, data);
    let mut beta = beta_init.to_vec();
    let mut current = obj.value(&beta);

    for _ in 0..cfg.max_inner {
        let (grad, info) = obj.gradient_hessian(&beta);
        let step = info
            .clone()
            .cholesky()
            .map(|c| c.solve(&grad))
            .ok_or_else(|| {
                Error::Numerical("Hessian in beta is singular; covariates are degenerate".into())
            })?;
        if grad.iter().all(|g| *g == 0.0) {
            return Ok(beta);
        }

        // the objective is concave, so halving restores ascent when a full
        // Newton step overshoots far from the optimum
        let mut alpha = 1.0;
        let (next, value) = loop {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, d)| b + alpha * d).collect();
            let value = obj.value(&trial);
            if value >= current || alpha < 1e-9 {
                break (trial, value);
            }
            alpha *= 0.5;
        };
        if let Some(b) = next.iter().find(|b| !(b.abs() <= cfg.beta_box)) {
            return Err(Error::Divergence(format!(
                "Newton iterate {b} left the region |beta| <= {}",
                cfg.beta_box
            )));
        }
        let moved = beta
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = next;
        current = value;
        if moved <= cfg.eta {
            return Ok(beta);
        }
    }
    Err(Error::Numerical(format!(
        "Newton–Raphson for beta did not converge in {} iterations",
        cfg.max_inner
    )))
}

/// Maximizes the chosen criterion over β with Λ fixed, by Newton–Raphson
/// with analytic gradient and Hessian.
///
/// Stops once the sup-norm of the step is at most `cfg.eta`.
pub fn newton_beta(
    lambda: &MonotoneStepFunction,
    data: &Dataset,
    beta_init: &[f64],
    cfg: &FitConfig,
    criterion: Criterion,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    data.check_beta(beta_init)?;
    if beta_init.iter().any(|b| b.abs() > cfg.beta_box) {
        return Err(Error::input("beta_init lies outside the parameter box"));
    }
    let values = lambda.on_grid(data.grid());
    if likelihood::on_grid(criterion, beta_init, &values, data) == f64::NEG_INFINITY {
        return Err(Error::input(
            "lambda vanishes where counts are positive; the criterion is -inf",
        ));
    }
    newton_on_grid(criterion, &values, data, beta_init, cfg)
}
