//! Bootstrap standard errors, Wald tests, and analytic asymptotic
//! covariances for the simulation scenarios.

pub mod asymptotic;
mod bootstrap;
mod wald;

pub use asymptotic::{
    covariance_w, covariance_w_with, scenario1_cov, scenario2_cov, scenario_cov, AsymptoticCov,
    CovariateQuadrature,
};
pub use bootstrap::{
    bootstrap_se, bootstrap_with, resample_indices, sample_covariance, BootstrapResult,
    DEFAULT_REPLICATES, MAX_FAILED_FRACTION,
};
pub use wald::{wald_test, WaldRow};
