//! Empirical L₂ distances between parameter points.
//!
//! `d1` compares baseline values at every observation time, `d2` compares
//! baseline increments over every inspection interval. Both put uniform mass
//! on the observations of the supplied dataset.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::step::Theta;

fn beta_gap(a: &Theta, b: &Theta, data: &Dataset) -> Result<f64> {
    data.check_beta(&a.beta)?;
    data.check_beta(&b.beta)?;
    Ok(a.beta.iter().zip(&b.beta).map(|(x, y)| (x - y).powi(2)).sum())
}

pub fn metric_d1(theta_hat: &Theta, theta0: &Theta, data: &Dataset) -> Result<f64> {
    let beta = beta_gap(theta_hat, theta0, data)?;
    let mut sum = 0.0;
    for s in data.subjects() {
        for &t in s.times() {
            sum += (theta_hat.lambda.eval(t)? - theta0.lambda.eval(t)?).powi(2);
        }
    }
    finish(beta, sum, data)
}

pub fn metric_d2(theta_hat: &Theta, theta0: &Theta, data: &Dataset) -> Result<f64> {
    let beta = beta_gap(theta_hat, theta0, data)?;
    let mut sum = 0.0;
    for s in data.subjects() {
        let (mut prev_hat, mut prev_0) = (0.0, 0.0);
        for &t in s.times() {
            let (hat, zero) = (theta_hat.lambda.eval(t)?, theta0.lambda.eval(t)?);
            sum += ((hat - prev_hat) - (zero - prev_0)).powi(2);
            prev_hat = hat;
            prev_0 = zero;
        }
    }
    finish(beta, sum, data)
}

fn finish(beta: f64, sum: f64, data: &Dataset) -> Result<f64> {
    let n = data.n_observations();
    if n == 0 {
        return Err(Error::input("dataset has no observations"));
    }
    Ok((beta + sum / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Subject;
    use crate::step::MonotoneStepFunction;

    fn toy() -> Dataset {
        Dataset::new(vec![
            Subject::new("a", vec![0.0, 0.0, 0.0], vec![1.0, 2.0], vec![0, 1]).unwrap(),
            Subject::new("b", vec![1.0, 0.0, 1.0], vec![1.5, 3.0], vec![1, 1]).unwrap(),
        ])
        .unwrap()
    }

    fn lam(values: &[f64]) -> MonotoneStepFunction {
        MonotoneStepFunction::new(vec![1.0, 1.5, 2.0, 3.0], values.to_vec()).unwrap()
    }

    #[test]
    fn identical_points_are_at_distance_zero() {
        let t = Theta::new(vec![0.1, 0.2, 0.3], lam(&[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(metric_d1(&t, &t, &toy()).unwrap(), 0.0);
        assert_eq!(metric_d2(&t, &t, &toy()).unwrap(), 0.0);
    }

    #[test]
    fn beta_only_difference() {
        let a = Theta::new(vec![1.0, 0.0, 0.0], lam(&[1.0, 2.0, 3.0, 4.0]));
        let b = Theta::new(vec![0.0, 0.0, 0.0], lam(&[1.0, 2.0, 3.0, 4.0]));
        assert!((metric_d1(&a, &b, &toy()).unwrap() - 1.0).abs() < 1e-15);
        let c = Theta::new(vec![2.0, 0.0, 0.0], lam(&[1.0, 2.0, 3.0, 4.0]));
        assert!((metric_d2(&c, &b, &toy()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_shift_in_lambda() {
        let a = Theta::new(vec![0.0; 3], lam(&[1.5, 2.5, 3.5, 4.5]));
        let b = Theta::new(vec![0.0; 3], lam(&[1.0, 2.0, 3.0, 4.0]));
        assert!((metric_d1(&a, &b, &toy()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_increment_gap() {
        // one subject, three increments, only the middle one differs by 0.3
        let d = Dataset::new(vec![
            Subject::new("a", vec![0.0], vec![1.0, 2.0, 3.0], vec![0, 1, 2]).unwrap(),
        ])
        .unwrap();
        let j = vec![1.0, 2.0, 3.0];
        let a = Theta::new(vec![0.0], MonotoneStepFunction::new(j.clone(), vec![1.0, 2.3, 3.3]).unwrap());
        let b = Theta::new(vec![0.0], MonotoneStepFunction::new(j, vec![1.0, 2.0, 3.0]).unwrap());
        let v = metric_d2(&a, &b, &d).unwrap();
        assert!((v - (0.09f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((v - 0.173_205).abs() < 1e-6);
    }
}
