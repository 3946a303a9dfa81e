//! Monte Carlo study runner.
//!
//! Replicate `r` draws its dataset from a ChaCha8 generator seeded with the
//! study seed on stream `r`, so results do not depend on thread scheduling.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generate::{gen_scenario, Scenario, DEFAULT_BETA0, DEFAULT_SLOPE};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{fit_mle_from, fit_mple, FitConfig, FitResult, Method};
use crate::inference::scenario_cov;
use crate::metrics::metric_d1;
use crate::step::{MonotoneStepFunction, Theta};

/// Largest tolerated fraction of failed fits per estimator.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Subjects per replicate.
    pub n: usize,
    pub reps: usize,
    pub beta0: Vec<f64>,
    /// Slope of the true baseline `Λ₀(t) = slope · t`.
    pub lambda_slope: f64,
    pub seed: u64,
    pub fit: FitConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: Scenario::One,
            n: 100,
            reps: 1000,
            beta0: DEFAULT_BETA0.to_vec(),
            lambda_slope: DEFAULT_SLOPE,
            seed: 1,
            fit: FitConfig::monte_carlo(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::input("need at least 2 subjects per replicate"));
        }
        if self.reps == 0 {
            return Err(Error::input("need at least 1 replicate"));
        }
        if self.beta0.len() != 3 {
            return Err(Error::input("scenario covariates have dimension 3"));
        }
        if !(self.lambda_slope > 0.0) {
            return Err(Error::input("baseline slope must be positive"));
        }
        self.fit.validate()
    }

    /// Dataset of replicate `r`.
    pub fn dataset(&self, r: usize) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(r as u64);
        gen_scenario(self.scenario, self.n, &self.beta0, self.lambda_slope, &mut rng)
    }

    /// True baseline on the replicate's observation grid.
    fn true_lambda(&self, data: &Dataset) -> Result<MonotoneStepFunction> {
        let grid = data.grid().to_vec();
        let values = grid.iter().map(|t| self.lambda_slope * t).collect();
        MonotoneStepFunction::new(grid, values)
    }
}

/// One estimator's outcome on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateFit {
    pub method: Method,
    /// `None` when the fit failed.
    pub beta: Option<Vec<f64>>,
    #[serde(skip)]
    pub lambda: Option<MonotoneStepFunction>,
    /// Distance to the true parameter on the replicate's observations.
    pub d1: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
    /// Wall-clock seconds; the likelihood fit includes its warm start.
    pub seconds: f64,
}

impl ReplicateFit {
    pub fn succeeded(&self) -> bool {
        self.beta.is_some() && self.converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub index: usize,
    pub fits: Vec<ReplicateFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub method: Method,
    pub bias: Vec<f64>,
    /// Sample standard deviation with the `reps − 1` denominator; absent for
    /// a single successful replicate.
    pub sd: Option<Vec<f64>>,
    /// Mean of `(β̂ − β₀)²`, which equals `BIAS² + SD²·(reps − 1)/reps`.
    pub mse: Vec<f64>,
    /// `sqrt(diag(Σ) / n)` from the analytic covariance.
    pub ase: Vec<f64>,
    pub mean_seconds: f64,
    /// Replicates whose fit errored or stopped at an iteration cap.
    pub nonconverged: usize,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStudy {
    pub config: ScenarioConfig,
    pub summaries: Vec<McSummary>,
    pub replicates: Vec<Replicate>,
}

impl McStudy {
    pub fn summary(&self, method: Method) -> Option<&McSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Fits of `method` across replicates, in replicate order.
    pub fn fits(&self, method: Method) -> impl Iterator<Item = &ReplicateFit> + '_ {
        self.replicates
            .iter()
            .flat_map(move |r| r.fits.iter().filter(move |f| f.method == method))
    }
}

fn record(
    method: Method,
    outcome: Result<&FitResult, String>,
    seconds: f64,
    data: &Dataset,
    theta0: &Theta,
) -> ReplicateFit {
    match outcome {
        Ok(fit) => {
            let theta = Theta::new(fit.beta.clone(), fit.lambda.clone());
            ReplicateFit {
                method,
                d1: metric_d1(&theta, theta0, data).ok(),
                beta: Some(theta.beta),
                lambda: Some(theta.lambda),
                converged: fit.converged,
                error: None,
                seconds,
            }
        }
        Err(e) => ReplicateFit {
            method,
            beta: None,
            lambda: None,
            d1: None,
            converged: false,
            error: Some(e),
            seconds,
        },
    }
}

fn run_replicate(config: &ScenarioConfig, methods: &[Method], index: usize) -> Result<Replicate> {
    let data = config.dataset(index)?;
    let theta0 = Theta::new(config.beta0.clone(), config.true_lambda(&data)?);
    let start = Instant::now();
    let pseudo = fit_mple(&data, &[0.0; 3], &config.fit);
    let pseudo_secs = start.elapsed().as_secs_f64();

    let mut fits = Vec::with_capacity(methods.len());
    for &method in methods {
        let fit = match method {
            Method::Mple => {
                let outcome = pseudo.as_ref().map_err(ToString::to_string);
                record(method, outcome, pseudo_secs, &data, &theta0)
            }
            Method::Mle => {
                let start = Instant::now();
                let outcome = match &pseudo {
                    Ok(p) => fit_mle_from(&data, p, &config.fit).map_err(|e| e.to_string()),
                    Err(e) => Err(format!("warm start failed: {e}")),
                };
                let secs = pseudo_secs + start.elapsed().as_secs_f64();
                record(method, outcome.as_ref().map_err(Clone::clone), secs, &data, &theta0)
            }
        };
        fits.push(fit);
    }
    Ok(Replicate { index, fits })
}

fn summarize(config: &ScenarioConfig, method: Method, fits: &[&ReplicateFit], ase: Vec<f64>) -> Result<McSummary> {
    let reps = fits.len();
    let ok: Vec<&[f64]> = fits
        .iter()
        .filter(|f| f.succeeded())
        .filter_map(|f| f.beta.as_deref())
        .collect();
    let nonconverged = reps - ok.len();
    if nonconverged as f64 > MAX_FAILED_FRACTION * reps as f64 || ok.is_empty() {
        return Err(Error::Inference(format!(
            "{method}: {nonconverged} of {reps} replicate fits failed"
        )));
    }
    let used = ok.len() as f64;
    let d = config.beta0.len();
    let mut bias = vec![0.0; d];
    let mut mse = vec![0.0; d];
    let mut mean = vec![0.0; d];
    for b in &ok {
        for j in 0..d {
            mean[j] += b[j] / used;
            mse[j] += (b[j] - config.beta0[j]).powi(2) / used;
        }
    }
    for j in 0..d {
        bias[j] = mean[j] - config.beta0[j];
    }
    let sd = (ok.len() > 1).then(|| {
        (0..d)
            .map(|j| (ok.iter().map(|b| (b[j] - mean[j]).powi(2)).sum::<f64>() / (used - 1.0)).sqrt())
            .collect()
    });
    let mean_seconds = fits.iter().map(|f| f.seconds).sum::<f64>() / reps as f64;
    Ok(McSummary {
        method,
        bias,
        sd,
        mse,
        ase,
        mean_seconds,
        nonconverged,
        used: ok.len(),
    })
}

/// Runs `config.reps` replicates in parallel and summarizes each estimator.
///
/// Both estimators share the pseudo-likelihood fit of a replicate, which the
/// likelihood fit uses as its warm start.
pub fn monte_carlo(config: &ScenarioConfig, methods: &[Method]) -> Result<McStudy> {
    config.validate()?;
    if methods.is_empty() {
        return Err(Error::input("no estimators requested"));
    }
    let replicates = (0..config.reps)
        .into_par_iter()
        .map(|r| run_replicate(config, methods, r))
        .collect::<Result<Vec<_>>>()?;

    let cov = scenario_cov(config.scenario, &config.beta0)?;
    let (ase_ps, ase_full) = cov.ase(config.n);
    let summaries = methods
        .iter()
        .map(|&m| {
            let fits: Vec<&ReplicateFit> = replicates
                .iter()
                .flat_map(|r| r.fits.iter().filter(|f| f.method == m))
                .collect();
            let ase = match m {
                Method::Mple => ase_ps.clone(),
                Method::Mle => ase_full.clone(),
            };
            summarize(config, m, &fits, ase)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(McStudy {
        config: config.clone(),
        summaries,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(reps: usize) -> ScenarioConfig {
        ScenarioConfig {
            n: 40,
            reps,
            seed: 9,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn single_replicate_has_exact_bias_and_no_sd() {
        let cfg = small(1);
        let study = monte_carlo(&cfg, &[Method::Mple, Method::Mle]).unwrap();
        for m in [Method::Mple, Method::Mle] {
            let s = study.summary(m).unwrap();
            let beta = study.fits(m).next().unwrap().beta.clone().unwrap();
            for j in 0..3 {
                assert_eq!(s.bias[j], beta[j] - cfg.beta0[j]);
            }
            assert!(s.sd.is_none());
        }
    }

    #[test]
    fn mse_decomposes() {
        let cfg = small(12);
        let study = monte_carlo(&cfg, &[Method::Mple]).unwrap();
        let s = study.summary(Method::Mple).unwrap();
        let sd = s.sd.as_ref().unwrap();
        let k = s.used as f64;
        for j in 0..3 {
            let want = s.bias[j].powi(2) + sd[j].powi(2) * (k - 1.0) / k;
            assert!((s.mse[j] - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn reproducible_across_runs() {
        let cfg = small(6);
        let a = monte_carlo(&cfg, &[Method::Mple, Method::Mle]).unwrap();
        let b = monte_carlo(&cfg, &[Method::Mple, Method::Mle]).unwrap();
        for (x, y) in a.replicates.iter().zip(&b.replicates) {
            for (fx, fy) in x.fits.iter().zip(&y.fits) {
                assert_eq!(fx.beta, fy.beta);
                assert_eq!(fx.lambda, fy.lambda);
            }
        }
        assert_eq!(cfg.dataset(3).unwrap(), cfg.dataset(3).unwrap());
        assert_ne!(cfg.dataset(3).unwrap(), cfg.dataset(4).unwrap());
    }

    #[test]
    fn ase_uses_matching_covariance() {
        let study = monte_carlo(&small(2), &[Method::Mple, Method::Mle]).unwrap();
        let ps = &study.summary(Method::Mple).unwrap().ase;
        let ml = &study.summary(Method::Mle).unwrap().ase;
        assert!(ps.iter().zip(ml).all(|(a, b)| a > b));
    }

    #[test]
    fn invalid_config() {
        let mut cfg = small(1);
        cfg.n = 1;
        assert!(monte_carlo(&cfg, &[Method::Mple]).is_err());
        assert!(monte_carlo(&small(1), &[]).is_err());
    }
}
