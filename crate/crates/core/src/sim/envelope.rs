use serde::Serialize;

use crate::error::{Error, Result};
use crate::step::MonotoneStepFunction;

use super::generate::TIME_RANGE;

pub const DEFAULT_GRID_POINTS: usize = 100;
/// Fewest replicates for which the tail percentiles are meaningful.
pub const MIN_REPLICATES: usize = 40;

/// Pointwise summary of replicate baseline estimates at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub t: f64,
    pub mean: f64,
    /// 2.5th percentile.
    pub lower: f64,
    /// 97.5th percentile.
    pub upper: f64,
}

/// Equispaced points covering the scenario observation window.
pub fn default_grid() -> Vec<f64> {
    let (a, b) = TIME_RANGE;
    let step = (b - a) / (DEFAULT_GRID_POINTS - 1) as f64;
    (0..DEFAULT_GRID_POINTS).map(|i| a + step * i as f64).collect()
}

/// Linear-interpolation quantile of sorted data (R type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Pointwise mean and 2.5/97.5 percentiles of `lambdas` on `grid`.
///
/// At least [`MIN_REPLICATES`] replicates are needed for stable tails; fewer
/// are accepted but the percentiles then sit close to the extremes.
pub fn lambda_envelope(lambdas: &[MonotoneStepFunction], grid: &[f64]) -> Result<Vec<EnvelopeRow>> {
    if lambdas.is_empty() {
        return Err(Error::input("no replicate estimates to summarize"));
    }
    grid.iter()
        .map(|&t| {
            let mut v = lambdas.iter().map(|l| l.eval(t)).collect::<Result<Vec<_>>>()?;
            v.sort_by(f64::total_cmp);
            Ok(EnvelopeRow {
                t,
                mean: v.iter().sum::<f64>() / v.len() as f64,
                lower: quantile_sorted(&v, 0.025),
                upper: quantile_sorted(&v, 0.975),
            })
        })
        .collect()
}
