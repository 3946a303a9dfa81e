//! JSON result documents.
//!
//! Numbers are written by serde_json, which emits the shortest decimal that
//! parses back to the same `f64`, so no precision is lost.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{FitResult, Method};
use crate::inference::{wald_test, AsymptoticCov, BootstrapResult};
use crate::sim::{default_grid, lambda_envelope, EnvelopeRow, McStudy, ScenarioConfig};

#[derive(Debug, Serialize)]
struct Coefficient {
    name: String,
    estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zstat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pvalue: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BootstrapInfo {
    replicates: usize,
    failed: usize,
}

#[derive(Debug, Serialize)]
struct FitDocument {
    method: Method,
    coefficients: Vec<Coefficient>,
    loglik: f64,
    iterations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<BootstrapInfo>,
    /// `(time, value)` rows of the baseline step function.
    lambda: Vec<[f64; 2]>,
}

fn nondecreasing(rows: &[[f64; 2]]) -> bool {
    rows.windows(2).all(|w| w[0][0] <= w[1][0] && w[0][1] <= w[1][1])
}

/// Fit document; the inference columns appear only with a bootstrap.
pub fn write_fit(result: &FitResult, boot: Option<&BootstrapResult>) -> Result<String> {
    let wald = boot.map(|b| wald_test(&result.beta, &b.se)).transpose()?;
    let coefficients = result
        .beta
        .iter()
        .enumerate()
        .map(|(j, &estimate)| {
            let row = wald.as_ref().map(|w| w[j]);
            Coefficient {
                name: format!("z{}", j + 1),
                estimate,
                se: row.map(|r| r.se),
                zstat: row.map(|r| r.zstat),
                pvalue: row.map(|r| r.pvalue),
            }
        })
        .collect();
    let lambda: Vec<[f64; 2]> = result
        .lambda
        .jumps()
        .iter()
        .zip(result.lambda.values())
        .map(|(&t, &v)| [t, v])
        .collect();
    if !nondecreasing(&lambda) {
        return Err(Error::Numerical("baseline step table is not monotone".into()));
    }
    let doc = FitDocument {
        method: result.method,
        coefficients,
        loglik: result.loglik,
        iterations: result.outer_iters,
        converged: result.converged,
        bootstrap: boot.map(|b| BootstrapInfo {
            replicates: b.replicates.len(),
            failed: b.failed,
        }),
        lambda,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("fit document serializes"))
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    method: Method,
    bias: Vec<f64>,
    sd: Option<Vec<f64>>,
    mse: Vec<f64>,
    ase: Vec<f64>,
    nonconverged: usize,
    used: usize,
}

#[derive(Debug, Serialize)]
struct Envelope {
    method: Method,
    rows: Vec<EnvelopeRow>,
}

#[derive(Debug, Serialize)]
struct StudyDocument<'a> {
    config: &'a ScenarioConfig,
    summaries: Vec<SummaryRow>,
    envelopes: Vec<Envelope>,
}

/// Study document with per-estimator summaries and baseline envelopes on
/// the default grid.
///
/// Runtimes are left out so the document depends only on the configuration.
pub fn write_study(study: &McStudy) -> Result<String> {
    let summaries = study
        .summaries
        .iter()
        .map(|s| SummaryRow {
            method: s.method,
            bias: s.bias.clone(),
            sd: s.sd.clone(),
            mse: s.mse.clone(),
            ase: s.ase.clone(),
            nonconverged: s.nonconverged,
            used: s.used,
        })
        .collect();
    let grid = default_grid();
    let envelopes = study
        .summaries
        .iter()
        .map(|s| {
            let lambdas: Vec<_> = study
                .fits(s.method)
                .filter(|f| f.succeeded())
                .filter_map(|f| f.lambda.clone())
                .collect();
            Ok(Envelope {
                method: s.method,
                rows: lambda_envelope(&lambdas, &grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = StudyDocument {
        config: &study.config,
        summaries,
        envelopes,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("study document serializes"))
}

#[derive(Debug, Serialize)]
struct CovDocument {
    scenario: u8,
    beta0: Vec<f64>,
    sigma_pseudo: Vec<Vec<f64>>,
    sigma: Vec<Vec<f64>>,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Asymptotic covariance document, matrices as lists of rows.
pub fn write_asymcov(scenario: u8, beta0: &[f64], cov: &AsymptoticCov) -> String {
    let doc = CovDocument {
        scenario,
        beta0: beta0.to_vec(),
        sigma_pseudo: rows(&cov.pseudo),
        sigma: rows(&cov.full),
    };
    serde_json::to_string_pretty(&doc).expect("covariance document serializes")
}
