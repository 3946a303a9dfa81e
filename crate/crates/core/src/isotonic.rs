//! Weighted isotonic regression and the closed-form pseudo-likelihood
//! profile step for the baseline mean function.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::step::MonotoneStepFunction;

/// Responses and positive weights at strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSeries {
    positions: Vec<f64>,
    responses: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSeries {
    pub fn new(positions: Vec<f64>, responses: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if responses.is_empty() {
            return Err(Error::input("empty series"));
        }
        if positions.len() != responses.len() || weights.len() != responses.len() {
            return Err(Error::input("positions, responses and weights differ in length"));
        }
        if positions.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::input("positions must be strictly increasing"));
        }
        if responses.iter().any(|y| !y.is_finite()) {
            return Err(Error::input("responses must be finite"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::input(format!("weights must be positive, found {w}")));
        }
        Ok(WeightedSeries {
            positions,
            responses,
            weights,
        })
    }

    /// Series at positions 1, 2, …, m.
    pub fn indexed(responses: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let positions = (1..=responses.len()).map(|i| i as f64).collect();
        WeightedSeries::new(positions, responses, weights)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// A maximal run `start..end` sharing one fitted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub mean: f64,
    pub weight: f64,
}

/// Pool-adjacent-violators on raw slices. Weights are assumed positive.
pub(crate) fn pava_blocks(y: &[f64], w: &[f64]) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::with_capacity(y.len());
    for (i, (&yi, &wi)) in y.iter().zip(w).enumerate() {
        let mut cur = Block {
            start: i,
            end: i + 1,
            mean: yi,
            weight: wi,
        };
        while let Some(prev) = blocks.last() {
            if prev.mean < cur.mean {
                break;
            }
            let prev = blocks.pop().unwrap();
            let weight = prev.weight + cur.weight;
            cur = Block {
                start: prev.start,
                end: cur.end,
                mean: (prev.mean * prev.weight + cur.mean * cur.weight) / weight,
                weight,
            };
        }
        blocks.push(cur);
    }
    blocks
}

pub(crate) fn expand(blocks: &[Block], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    for b in blocks {
        out.extend(std::iter::repeat_n(b.mean, b.end - b.start));
    }
    out
}

pub(crate) fn pava_slices(y: &[f64], w: &[f64]) -> Vec<f64> {
    expand(&pava_blocks(y, w), y.len())
}

/// Weighted least-squares projection of the responses onto nondecreasing
/// sequences, by the linear-time stack form of pool-adjacent-violators.
pub fn pava(series: &WeightedSeries) -> Vec<f64> {
    pava_slices(&series.responses, &series.weights)
}

/// Max-min formula for the isotonic fit, evaluated by brute force in O(m³).
///
/// `λₗ = max_{r≤l} min_{q≥l} Σ_{r..=q} w y / Σ_{r..=q} w`. Kept as an
/// independent check of [`pava`]; not meant for production sizes.
pub fn isotonic_maxmin(series: &WeightedSeries) -> Vec<f64> {
    let (y, w) = (&series.responses, &series.weights);
    let m = y.len();
    // prefix sums make each block average O(1)
    let mut sw = vec![0.0; m + 1];
    let mut swy = vec![0.0; m + 1];
    for i in 0..m {
        sw[i + 1] = sw[i] + w[i];
        swy[i + 1] = swy[i] + w[i] * y[i];
    }
    let avg = |r: usize, q: usize| (swy[q + 1] - swy[r]) / (sw[q + 1] - sw[r]);
    (0..m)
        .map(|l| {
            (0..=l)
                .map(|r| (l..m).map(|q| avg(r, q)).fold(f64::INFINITY, f64::min))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Per-grid-point sufficient statistics of the pseudo-likelihood:
/// pooled counts and pooled weights `Σ exp(βᵀz)`.
pub(crate) fn pooled_pseudo_stats(beta: &[f64], data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let m = data.grid().len();
    let mut counts = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for (i, s) in data.subjects().iter().enumerate() {
        let scale = s.linear_predictor(beta).exp();
        for (&g, &n) in data.grid_index(i).iter().zip(s.counts()) {
            counts[g] += n as f64;
            weights[g] += scale;
        }
    }
    (counts, weights)
}

pub(crate) fn profile_blocks(beta: &[f64], data: &Dataset) -> Result<(Vec<Block>, Vec<f64>)> {
    let (counts, weights) = pooled_pseudo_stats(beta, data);
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Numerical(
            "pooled weights overflowed; beta too large for these covariates".into(),
        ));
    }
    let y: Vec<f64> = counts.iter().zip(&weights).map(|(n, w)| n / w).collect();
    let blocks = pava_blocks(&y, &weights);
    let values = expand(&blocks, y.len());
    Ok((blocks, values))
}

/// Maximizer of the pseudo log-likelihood over Λ for fixed β.
///
/// Pools observations by distinct time and returns the weighted isotonic
/// regression of pooled count over pooled `exp(βᵀz)`, with those pooled
/// exponentials as weights.
pub fn profile_lambda_pseudo(beta: &[f64], data: &Dataset) -> Result<MonotoneStepFunction> {
    data.check_beta(beta)?;
    let (_, values) = profile_blocks(beta, data)?;
    MonotoneStepFunction::new(data.grid().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Subject;
    use crate::likelihood::loglik_pseudo;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(y: &[f64], w: &[f64]) -> WeightedSeries {
        WeightedSeries::indexed(y.to_vec(), w.to_vec()).unwrap()
    }

    #[test]
    fn monotone_input_is_fixed() {
        let s = series(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        assert_eq!(pava(&s), vec![1.0, 2.0, 3.0]);
        assert_eq!(isotonic_maxmin(&s), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_violation_pools() {
        let s = series(&[3.0, 1.0], &[1.0, 1.0]);
        assert_eq!(pava(&s), vec![2.0, 2.0]);
        assert_eq!(isotonic_maxmin(&s), vec![2.0, 2.0]);
    }

    #[test]
    fn weighted_pool() {
        let s = series(&[1.0, 3.0, 2.0], &[1.0, 1.0, 2.0]);
        let want = [1.0, 7.0 / 3.0, 7.0 / 3.0];
        for got in [pava(&s), isotonic_maxmin(&s)] {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_series() {
        assert!(WeightedSeries::indexed(vec![], vec![]).is_err());
        assert!(WeightedSeries::indexed(vec![1.0], vec![0.0]).is_err());
        assert!(WeightedSeries::indexed(vec![1.0], vec![-1.0]).is_err());
        assert!(WeightedSeries::new(vec![2.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn tied_means_merge() {
        let blocks = pava_blocks(&[1.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        assert_eq!(blocks.len(), 2);
        assert_eq!((blocks[0].start, blocks[0].end), (0, 2));
    }

    proptest! {
        #[test]
        fn pava_matches_maxmin_and_kkt(
            pairs in prop::collection::vec((-5.0f64..5.0, 0.01f64..4.0), 1..=12)
        ) {
            let (y, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let s = series(&y, &w);
            let fit = pava(&s);
            let oracle = isotonic_maxmin(&s);
            for (a, b) in fit.iter().zip(&oracle) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
            prop_assert!(fit.windows(2).all(|p| p[0] <= p[1]));
            // block means are weighted means of their responses, strictly increasing
            let blocks = pava_blocks(&y, &w);
            for b in &blocks {
                let resid: f64 = (b.start..b.end).map(|i| w[i] * (y[i] - b.mean)).sum();
                prop_assert!(resid.abs() < 1e-9);
            }
            prop_assert!(blocks.windows(2).all(|p| p[0].mean < p[1].mean));
            let total: f64 = (0..y.len()).map(|i| w[i] * (y[i] - fit[i])).sum();
            prop_assert!(total.abs() < 1e-9);
        }
    }

    fn toy(rng: &mut ChaCha8Rng, n: usize) -> Dataset {
        let subjects = (0..n)
            .map(|i| {
                let k = rng.gen_range(1..=4);
                let mut c = 0;
                let obs = (0..k)
                    .map(|_| {
                        c += rng.gen_range(0..4);
                        (rng.gen_range(1..8) as f64, c)
                    })
                    .collect::<Vec<_>>();
                // counts must follow time order, so sort times and reassign counts
                let mut times: Vec<f64> = obs.iter().map(|o| o.0).collect();
                times.sort_by(f64::total_cmp);
                let counts: Vec<u64> = obs.iter().map(|o| o.1).collect();
                let obs = times.into_iter().zip(counts).collect();
                Subject::from_observations(format!("{i}"), vec![rng.gen_range(-1.0..1.0)], obs).unwrap()
            })
            .collect();
        Dataset::new(subjects).unwrap()
    }

    #[test]
    fn profile_one_point() {
        let d = Dataset::new(vec![Subject::new("a", vec![0.7], vec![1.0], vec![5]).unwrap()]).unwrap();
        let f = profile_lambda_pseudo(&[0.3], &d).unwrap();
        assert!((f.values()[0] - 5.0 * (-0.21f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn profile_pooled_mean() {
        let d = Dataset::new(vec![
            Subject::new("a", vec![0.0], vec![1.0], vec![2]).unwrap(),
            Subject::new("b", vec![1.0], vec![1.0], vec![4]).unwrap(),
        ])
        .unwrap();
        assert_eq!(profile_lambda_pseudo(&[0.0], &d).unwrap().values(), &[3.0]);
    }

    #[test]
    fn profile_reduces_to_pava() {
        // pooled counts (1, 3, 4) with pooled weights (1, 1, 2) at β = 0
        let d = Dataset::new(vec![
            Subject::new("a", vec![0.0], vec![1.0, 2.0, 3.0], vec![1, 3, 3]).unwrap(),
            Subject::new("b", vec![0.0], vec![3.0], vec![1]).unwrap(),
        ])
        .unwrap();
        let v = profile_lambda_pseudo(&[0.0], &d).unwrap();
        let want = [1.0, 7.0 / 3.0, 7.0 / 3.0];
        for (g, w) in v.values().iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
        let d = Dataset::new(vec![
            Subject::new("a", vec![0.0], vec![1.0, 2.0, 3.0], vec![1, 3, 3]).unwrap(),
            Subject::new("b", vec![0.0], vec![3.0], vec![3]).unwrap(),
        ])
        .unwrap();
        // pooled (1, 3, 6) / (1, 1, 2) = (1, 3, 3): already monotone
        let (counts, weights) = pooled_pseudo_stats(&[0.0], &d);
        assert_eq!(counts, vec![1.0, 3.0, 6.0]);
        assert_eq!(weights, vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn profile_is_argmax_against_random_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = toy(&mut rng, 6);
            let beta = [rng.gen_range(-1.0..1.0)];
            let best = profile_lambda_pseudo(&beta, &d).unwrap();
            let top = loglik_pseudo(&beta, &best, &d).unwrap();
            let m = d.grid().len();
            for _ in 0..100 {
                let mut v = 0.0;
                let values: Vec<f64> = (0..m)
                    .map(|l| {
                        // perturb around the optimum while staying monotone
                        v = f64::max(v, best.values()[l] + rng.gen_range(-0.5..0.5)).max(0.0);
                        v
                    })
                    .collect();
                let cand = MonotoneStepFunction::new(d.grid().to_vec(), values).unwrap();
                assert!(loglik_pseudo(&beta, &cand, &d).unwrap() <= top + 1e-12);
            }
        }
    }

    #[test]
    fn profile_scales_with_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = toy(&mut rng, 8);
        let tripled = Dataset::new(
            d.subjects()
                .iter()
                .map(|s| {
                    Subject::new(
                        s.id(),
                        s.z().to_vec(),
                        s.times().to_vec(),
                        s.counts().iter().map(|c| 3 * c).collect(),
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let a = profile_lambda_pseudo(&[0.4], &d).unwrap();
        let b = profile_lambda_pseudo(&[0.4], &tripled).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((3.0 * x - y).abs() < 1e-12);
        }
    }
}
