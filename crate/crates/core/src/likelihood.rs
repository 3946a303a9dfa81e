//! Pseudo and full Poisson log-likelihoods of the proportional mean model.
//!
//! Both drop the `log N!` terms, which do not involve (β, Λ). The convention
//! `0 · log 0 = 0` applies; a zero mean against a positive count yields
//! `f64::NEG_INFINITY`, which optimizers treat as an infeasible point.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::Result;
use crate::step::MonotoneStepFunction;

/// Which criterion an estimator maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Marginal Poisson counts at each inspection time.
    Pseudo,
    /// Independent Poisson increments between inspections.
    Full,
}

#[inline]
pub(crate) fn xlogy(n: f64, m: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else if m > 0.0 {
        n * m.ln()
    } else {
        f64::NEG_INFINITY
    }
}

pub fn loglik_pseudo(beta: &[f64], lambda: &MonotoneStepFunction, data: &Dataset) -> Result<f64> {
    data.check_beta(beta)?;
    Ok(pseudo_on_grid(beta, &lambda.on_grid(data.grid()), data))
}

pub fn loglik_full(beta: &[f64], lambda: &MonotoneStepFunction, data: &Dataset) -> Result<f64> {
    data.check_beta(beta)?;
    Ok(full_on_grid(beta, &lambda.on_grid(data.grid()), data))
}

pub fn loglik(
    criterion: Criterion,
    beta: &[f64],
    lambda: &MonotoneStepFunction,
    data: &Dataset,
) -> Result<f64> {
    match criterion {
        Criterion::Pseudo => loglik_pseudo(beta, lambda, data),
        Criterion::Full => loglik_full(beta, lambda, data),
    }
}

/// Pseudo log-likelihood with Λ given by its values on `data.grid()`.
pub(crate) fn pseudo_on_grid(beta: &[f64], values: &[f64], data: &Dataset) -> f64 {
    let mut total = 0.0;
    for (i, s) in data.subjects().iter().enumerate() {
        let eta = s.linear_predictor(beta);
        let scale = eta.exp();
        for (&g, &n) in data.grid_index(i).iter().zip(s.counts()) {
            let n = n as f64;
            let m = values[g];
            total += xlogy(n, m) + n * eta - scale * m;
        }
    }
    total
}

/// Full log-likelihood with Λ given by its values on `data.grid()`.
pub(crate) fn full_on_grid(beta: &[f64], values: &[f64], data: &Dataset) -> f64 {
    let mut total = 0.0;
    for (i, s) in data.subjects().iter().enumerate() {
        let eta = s.linear_predictor(beta);
        let scale = eta.exp();
        let mut prev = 0.0;
        for (&g, dn) in data.grid_index(i).iter().zip(s.increments()) {
            let dn = dn as f64;
            let dl = values[g] - prev;
            prev = values[g];
            total += xlogy(dn, dl) + dn * eta - scale * dl;
        }
    }
    total
}

pub(crate) fn on_grid(criterion: Criterion, beta: &[f64], values: &[f64], data: &Dataset) -> f64 {
    match criterion {
        Criterion::Pseudo => pseudo_on_grid(beta, values, data),
        Criterion::Full => full_on_grid(beta, values, data),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Subject;

    fn step(jumps: &[f64], values: &[f64]) -> MonotoneStepFunction {
        MonotoneStepFunction::new(jumps.to_vec(), values.to_vec()).unwrap()
    }

    fn one(z: Vec<f64>, times: Vec<f64>, counts: Vec<u64>) -> Dataset {
        Dataset::new(vec![Subject::new("s", z, times, counts).unwrap()]).unwrap()
    }

    #[test]
    fn pseudo_single_zero_count() {
        let d = one(vec![0.0], vec![1.0], vec![0]);
        let v = loglik_pseudo(&[0.0], &step(&[1.0], &[1.0]), &d).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn pseudo_two_observations() {
        // independently: (1·ln1 + 1·ln2 − 2·1) + (3·ln2 + 3·ln2 − 2·2)
        let d = one(vec![1.0], vec![1.0, 2.0], vec![1, 3]);
        let v = loglik_pseudo(&[2f64.ln()], &step(&[1.0, 2.0], &[1.0, 2.0]), &d).unwrap();
        assert!((v - (7.0 * 2f64.ln() - 6.0)).abs() < 1e-12);
        assert!((v - -1.147_97).abs() < 1e-5);
    }

    #[test]
    fn pseudo_zero_mean_positive_count() {
        let d = one(vec![0.0], vec![1.0], vec![2]);
        let v = loglik_pseudo(&[0.0], &step(&[2.0], &[1.0]), &d).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn full_single_increment() {
        let d = one(vec![0.0], vec![1.0], vec![0]);
        assert_eq!(loglik_full(&[0.0], &step(&[1.0], &[1.0]), &d).unwrap(), -1.0);
        assert_eq!(loglik_full(&[0.0], &step(&[1.0], &[2.5]), &d).unwrap(), -2.5);
    }

    #[test]
    fn full_two_increments() {
        let d = one(vec![1.0], vec![1.0, 2.0], vec![1, 3]);
        let v = loglik_full(&[0.0], &step(&[1.0, 2.0], &[1.0, 2.0]), &d).unwrap();
        assert!((v - -2.0).abs() < 1e-12);
    }

    #[test]
    fn full_zero_increment_positive_count() {
        let d = one(vec![0.0], vec![1.0, 2.0], vec![0, 1]);
        let v = loglik_full(&[0.0], &step(&[1.0], &[1.0]), &d).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn dimension_mismatch() {
        let d = one(vec![0.0], vec![1.0], vec![0]);
        assert!(loglik_full(&[0.0, 1.0], &step(&[1.0], &[1.0]), &d).is_err());
        assert!(loglik_pseudo(&[], &step(&[1.0], &[1.0]), &d).is_err());
    }
}
