use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous nondecreasing step function with Λ(0) = 0.
///
/// Evaluates to `values[l]` on `[jumps[l], jumps[l + 1])` and to zero before
/// the first jump. Past the last jump the final value is carried forward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneStepFunction {
    jumps: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneStepFunction {
    pub fn new(jumps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jumps.len() != values.len() {
            return Err(Error::input(format!(
                "{} jump locations but {} values",
                jumps.len(),
                values.len()
            )));
        }
        if jumps.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::input("jump locations must be finite and positive"));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("jump locations must be strictly increasing"));
        }
        if values.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::input("values must be finite and nonnegative"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("values must be nondecreasing"));
        }
        Ok(MonotoneStepFunction { jumps, values })
    }

    /// Identically zero function.
    pub fn zero() -> Self {
        MonotoneStepFunction {
            jumps: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("step function evaluated at t = {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let pos = self.jumps.partition_point(|&j| j <= t);
        if pos == 0 {
            0.0
        } else {
            self.values[pos - 1]
        }
    }

    /// True when `t` lies beyond the last jump, where the estimate is only a
    /// constant extension.
    pub fn is_extrapolated(&self, t: f64) -> bool {
        self.jumps.last().is_none_or(|&last| t > last)
    }

    /// Values at each point of a sorted grid.
    pub fn on_grid(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&t| self.eval_unchecked(t)).collect()
    }

    /// Multiplies every value by a positive constant.
    pub fn scaled(&self, factor: f64) -> Self {
        MonotoneStepFunction {
            jumps: self.jumps.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Eval alias used by callers that prefer the free-function form.
pub fn eval_step(f: &MonotoneStepFunction, t: f64) -> Result<f64> {
    f.eval(t)
}

/// A full parameter point (β, Λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub beta: Vec<f64>,
    pub lambda: MonotoneStepFunction,
}

impl Theta {
    pub fn new(beta: Vec<f64>, lambda: MonotoneStepFunction) -> Self {
        Theta { beta, lambda }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f() -> MonotoneStepFunction {
        MonotoneStepFunction::new(vec![1.0, 2.0], vec![3.0, 5.0]).unwrap()
    }

    #[test]
    fn evaluation_points() {
        assert_eq!(eval_step(&f(), 0.5).unwrap(), 0.0);
        assert_eq!(eval_step(&f(), 1.0).unwrap(), 3.0);
        assert_eq!(eval_step(&f(), 1.7).unwrap(), 3.0);
        assert_eq!(eval_step(&f(), 2.0).unwrap(), 5.0);
        assert_eq!(eval_step(&f(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_time_is_domain_error() {
        assert!(matches!(f().eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn extrapolation_flag() {
        assert!(!f().is_extrapolated(2.0));
        assert!(f().is_extrapolated(2.5));
    }

    #[test]
    fn construction_checks() {
        assert!(MonotoneStepFunction::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(MonotoneStepFunction::new(vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        assert!(MonotoneStepFunction::new(vec![1.0], vec![-1.0]).is_err());
        assert!(MonotoneStepFunction::new(vec![0.0], vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn eval_is_nondecreasing(
            steps in prop::collection::vec((0.01f64..3.0, 0.0f64..2.0), 1..20),
            a in 0.0f64..40.0,
            b in 0.0f64..40.0,
        ) {
            let mut t = 0.0;
            let mut v = 0.0;
            let (jumps, values): (Vec<f64>, Vec<f64>) = steps
                .into_iter()
                .map(|(dt, dv)| { t += dt; v += dv; (t, v) })
                .unzip();
            let f = MonotoneStepFunction::new(jumps, values).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.eval(lo).unwrap() <= f.eval(hi).unwrap());
        }
    }
}
