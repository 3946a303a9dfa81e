use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// One coefficient's Wald test against zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaldRow {
    pub estimate: f64,
    pub se: f64,
    pub zstat: f64,
    /// Two-sided normal p-value.
    pub pvalue: f64,
}

pub fn wald_test(estimates: &[f64], se: &[f64]) -> Result<Vec<WaldRow>> {
    if estimates.len() != se.len() {
        return Err(Error::input(format!(
            "{} estimates but {} standard errors",
            estimates.len(),
            se.len()
        )));
    }
    estimates
        .iter()
        .zip(se)
        .map(|(&estimate, &se)| {
            if !(se > 0.0 && se.is_finite()) {
                return Err(Error::input(format!("standard error must be positive, got {se}")));
            }
            let zstat = estimate / se;
            // 2(1 − Φ(|z|)) = erfc(|z| / √2), without cancellation in the tail
            let pvalue = erfc(zstat.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
            Ok(WaldRow {
                estimate,
                se,
                zstat,
                pvalue,
            })
        })
        .collect()
}
