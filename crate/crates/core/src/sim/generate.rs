//! Data generators for the two reference simulation scenarios.
//!
//! Covariates are `Z₁ ~ Unif(0,1)`, `Z₂ ~ N(0,1)`, `Z₃ ~ Bernoulli(0.5)`.
//! Each subject has K uniform on {1, …, 6} inspection times, the order
//! statistics of K draws from Unif(1, 10) rounded to two decimals (ties
//! within a subject are collapsed). Counts follow a Poisson process with
//! mean function `slope · t · exp(β₀ᵀZ)`; in scenario 2 the slope carries a
//! subject-level frailty `α ∈ {−0.4, 0, 0.4}` with probabilities
//! (0.25, 0.5, 0.25).

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Subject};
use crate::error::{Error, Result};

pub const DEFAULT_BETA0: [f64; 3] = [-1.0, 0.5, 1.5];
pub const DEFAULT_SLOPE: f64 = 2.0;
pub const MAX_K: usize = 6;
pub const TIME_RANGE: (f64, f64) = (1.0, 10.0);
pub const FRAILTY: [(f64, f64); 3] = [(-0.4, 0.25), (0.0, 0.5), (0.4, 0.25)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Conditionally Poisson counts.
    One,
    /// Mixed Poisson counts with a discrete frailty on the intensity.
    Two,
}

impl Scenario {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            _ => Err(Error::input(format!("unknown scenario {n} (expected 1 or 2)"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
        }
    }
}

/// Covariates and unrounded, sorted inspection times of one subject.
#[derive(Debug, Clone)]
pub(crate) struct Design {
    pub z: [f64; 3],
    pub raw_times: Vec<f64>,
}

pub(crate) fn draw_design<R: Rng + ?Sized>(rng: &mut R) -> Design {
    let z1: f64 = rng.gen();
    let z2: f64 = StandardNormal.sample(rng);
    let z3 = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
    let k = rng.gen_range(1..=MAX_K);
    let mut raw_times: Vec<f64> = (0..k).map(|_| rng.gen_range(TIME_RANGE.0..TIME_RANGE.1)).collect();
    raw_times.sort_by(f64::total_cmp);
    Design {
        z: [z1, z2, z3],
        raw_times,
    }
}

pub(crate) fn draw_frailty<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (alpha, p) in FRAILTY {
        acc += p;
        if u < acc {
            return alpha;
        }
    }
    FRAILTY[FRAILTY.len() - 1].0
}

fn round2(t: f64) -> f64 {
    (t * 100.0).round() / 100.0
}

fn counts_for<R: Rng + ?Sized>(times: &[f64], rate: f64, rng: &mut R) -> Vec<u64> {
    let mut prev_t = 0.0;
    let mut total = 0u64;
    times
        .iter()
        .map(|&t| {
            let mean = rate * (t - prev_t);
            prev_t = t;
            if mean > 0.0 {
                total += Poisson::new(mean).expect("positive mean").sample(rng) as u64;
            }
            total
        })
        .collect()
}

/// One simulated subject.
pub fn gen_subject<R: Rng + ?Sized>(
    scenario: Scenario,
    id: usize,
    beta0: &[f64],
    slope: f64,
    rng: &mut R,
) -> Subject {
    let design = draw_design(rng);
    let mut times: Vec<f64> = design.raw_times.iter().map(|&t| round2(t)).collect();
    times.dedup();
    let frailty = match scenario {
        Scenario::One => 0.0,
        Scenario::Two => draw_frailty(rng),
    };
    let eta: f64 = design.z.iter().zip(beta0).map(|(z, b)| z * b).sum();
    let counts = counts_for(&times, (slope + frailty) * eta.exp(), rng);
    Subject::new(format!("{id}"), design.z.to_vec(), times, counts).expect("generated subject is valid")
}

pub fn gen_scenario<R: Rng + ?Sized>(
    scenario: Scenario,
    n: usize,
    beta0: &[f64],
    slope: f64,
    rng: &mut R,
) -> Result<Dataset> {
    if beta0.len() != 3 {
        return Err(Error::input("scenario covariates have dimension 3"));
    }
    if !(slope > 0.0) {
        return Err(Error::input("baseline slope must be positive"));
    }
    if n == 0 {
        return Err(Error::input("need at least one subject"));
    }
    let subjects = (0..n).map(|i| gen_subject(scenario, i, beta0, slope, rng)).collect();
    Dataset::new(subjects)
}

pub fn gen_scenario1<R: Rng + ?Sized>(n: usize, beta0: &[f64], rng: &mut R) -> Result<Dataset> {
    gen_scenario(Scenario::One, n, beta0, DEFAULT_SLOPE, rng)
}

pub fn gen_scenario2<R: Rng + ?Sized>(n: usize, beta0: &[f64], rng: &mut R) -> Result<Dataset> {
    gen_scenario(Scenario::Two, n, beta0, DEFAULT_SLOPE, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const DRAWS: usize = 100_000;

    // Kolmogorov–Smirnov statistic against a continuous cdf
    fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn generated_subjects_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for sc in [Scenario::One, Scenario::Two] {
            let d = gen_scenario(sc, 2000, &DEFAULT_BETA0, 2.0, &mut rng).unwrap();
            for s in d.subjects() {
                assert!(s.k() <= MAX_K);
                assert!(s.times().iter().all(|&t| (1.0..=10.0).contains(&t)));
                assert!(s.counts().windows(2).all(|w| w[0] <= w[1]));
                assert!(s.times().iter().all(|&t| (t * 100.0 - (t * 100.0).round()).abs() < 1e-6));
            }
        }
    }

    #[test]
    fn k_is_uniform_on_one_to_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mean = (0..DRAWS).map(|_| draw_design(&mut rng).raw_times.len() as f64).sum::<f64>() / DRAWS as f64;
        assert!((mean - 3.5).abs() < 0.02, "{mean}");
    }

    #[test]
    fn marginals_pass_ks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut z1 = Vec::with_capacity(DRAWS);
        let mut times = Vec::new();
        while z1.len() < DRAWS {
            let d = draw_design(&mut rng);
            z1.push(d.z[0]);
            // one time per subject keeps the draws independent
            let pick = rng.gen_range(0..d.raw_times.len());
            if times.len() < DRAWS {
                // the j-th order statistic is not uniform, but a uniformly
                // chosen element of the unsorted sample is
                times.push(d.raw_times[pick]);
            }
        }
        let crit = 1.628 / (DRAWS as f64).sqrt();
        assert!(ks(z1, |x| x.clamp(0.0, 1.0)) < crit);
        assert!(ks(times, |t| ((t - 1.0) / 9.0).clamp(0.0, 1.0)) < crit);
    }

    #[test]
    fn conditional_mean_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = gen_scenario1(DRAWS, &DEFAULT_BETA0, &mut rng).unwrap();
        let mean = d
            .subjects()
            .iter()
            .map(|s| {
                let t = *s.times().last().unwrap();
                *s.counts().last().unwrap() as f64 / (2.0 * t * s.linear_predictor(&DEFAULT_BETA0).exp())
            })
            .sum::<f64>()
            / DRAWS as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn frailty_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tally = [0usize; 3];
        let mut sum = 0.0;
        for _ in 0..DRAWS {
            let a = draw_frailty(&mut rng);
            sum += a;
            tally[FRAILTY.iter().position(|f| f.0 == a).unwrap()] += 1;
        }
        for (k, (_, p)) in FRAILTY.iter().enumerate() {
            assert!((tally[k] as f64 / DRAWS as f64 - p).abs() < 0.01);
        }
        assert!((sum / DRAWS as f64).abs() < 0.005);
    }

    #[test]
    fn scenario_two_is_overdispersed() {
        // Var(N | Z, T) exceeds E(N | Z, T) once the frailty is integrated out.
        // Pool standardized residuals (N − m)² − m over subjects.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = gen_scenario2(DRAWS, &DEFAULT_BETA0, &mut rng).unwrap();
        let (mut excess, mut scale) = (0.0, 0.0);
        for s in d.subjects() {
            let m = 2.0 * s.times().last().unwrap() * s.linear_predictor(&DEFAULT_BETA0).exp();
            let n = *s.counts().last().unwrap() as f64;
            excess += (n - m).powi(2) - m;
            scale += m * m;
        }
        // E[(N − m)² − m] = Var(α) t² e^{2βz} = 0.08 · m² / 4
        let ratio = excess / scale;
        assert!(ratio > 0.0);
        assert!((ratio - 0.02).abs() < 0.005, "{ratio}");
    }

    #[test]
    fn same_seed_same_data() {
        let a = gen_scenario2(50, &DEFAULT_BETA0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = gen_scenario2(50, &DEFAULT_BETA0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
