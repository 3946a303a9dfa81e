//! Maximum pseudo-likelihood and maximum likelihood estimation.

mod fit;
mod icm;
mod newton;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::Criterion;
use crate::step::MonotoneStepFunction;

pub use fit::{fit, fit_mle, fit_mle_from, fit_mple, mle_warm_start};
pub use icm::{icm_lambda, IcmOutcome};
pub use newton::newton_beta;

pub(crate) use icm::icm_on_grid;
pub(crate) use newton::newton_on_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Maximum pseudo-likelihood.
    Mple,
    /// Maximum likelihood.
    Mle,
}

impl Method {
    pub fn criterion(self) -> Criterion {
        match self {
            Method::Mple => Criterion::Pseudo,
            Method::Mle => Criterion::Full,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mple => "mple",
            Method::Mle => "mle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mple" => Ok(Method::Mple),
            "mle" => Ok(Method::Mle),
            other => Err(Error::input(format!("unknown method `{other}` (expected mple or mle)"))),
        }
    }
}

/// Convergence tolerances and guards shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Relative log-likelihood change (outer loop and ICM) and sup-norm
    /// Newton step size below which iteration stops.
    pub eta: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Iterates with `|β|∞ > beta_box` are reported as divergent.
    pub beta_box: f64,
    /// Smallest baseline increment the ICM line search accepts where the
    /// observed count increment is positive.
    pub delta_floor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            eta: 1e-10,
            max_outer: 500,
            max_inner: 2000,
            beta_box: 10.0,
            delta_floor: 1e-10,
        }
    }
}

impl FitConfig {
    /// Looser tolerance used for Monte Carlo replicates.
    pub fn monte_carlo() -> Self {
        FitConfig {
            eta: 1e-6,
            ..FitConfig::default()
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        FitConfig { eta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::input("eta must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::input("iteration caps must be at least 1"));
        }
        if !(self.beta_box > 0.0) {
            return Err(Error::input("beta_box must be positive"));
        }
        if !(self.delta_floor >= 0.0) {
            return Err(Error::input("delta_floor must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub method: Method,
    pub beta: Vec<f64>,
    pub lambda: MonotoneStepFunction,
    pub loglik: f64,
    pub outer_iters: usize,
    pub converged: bool,
    /// Log-likelihood at the starting point and after every outer iteration.
    pub trace: Vec<f64>,
}

/// `|new − old| / |old|`, falling back to the absolute change at zero.
pub(crate) fn relative_change(new: f64, old: f64) -> f64 {
    let diff = (new - old).abs();
    if old == 0.0 {
        diff
    } else {
        diff / old.abs()
    }
}
