//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's solvers; the likelihood is
//! re-derived from the observations directly.

#![allow(dead_code)]

use panelcount::{Dataset, Subject};
use rand::Rng;

/// Full log-likelihood from grid increments `delta` (Λ at grid point l is
/// `delta[0] + … + delta[l]`).
pub fn full_loglik(beta: &[f64], delta: &[f64], data: &Dataset) -> f64 {
    let cum: Vec<f64> = delta
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    let mut total = 0.0;
    for s in data.subjects() {
        let eta: f64 = s.z().iter().zip(beta).map(|(z, b)| z * b).sum();
        let mut prev_t = 0.0;
        let mut prev_n = 0u64;
        for (&t, &n) in s.times().iter().zip(s.counts()) {
            let at = |x: f64| data.grid().iter().position(|&g| g == x).map_or(0.0, |l| cum[l]);
            let dl = at(t) - if prev_t > 0.0 { at(prev_t) } else { 0.0 };
            let dn = (n - prev_n) as f64;
            if dn > 0.0 {
                if dl <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                total += dn * dl.ln() + dn * eta;
            }
            total -= eta.exp() * dl;
            prev_t = t;
            prev_n = n;
        }
    }
    total
}

/// Maximizes a one-dimensional unimodal `f` on `[lo, hi]` by repeatedly
/// evaluating a 21-point grid and shrinking the window around the best point.
pub fn zoom_search(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const POINTS: usize = 21;
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    while b - a > 1e-13 * (1.0 + best.0.abs()) {
        let h = (b - a) / (POINTS - 1) as f64;
        for i in 0..POINTS {
            let x = a + h * i as f64;
            let v = f(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        a = (best.0 - 2.0 * h).max(lo);
        b = (best.0 + 2.0 * h).min(hi);
    }
    best
}

/// Alternating coordinate-wise grid search over β (each coordinate in
/// `[-beta_box, beta_box]`, held fixed when `beta_box` is `None`) and the
/// grid increments (each in `[0, delta_max]`), run until a full sweep gains
/// less than `tol`.
pub fn alternating_search(
    data: &Dataset,
    mut beta: Vec<f64>,
    mut delta: Vec<f64>,
    beta_box: Option<f64>,
    delta_max: f64,
    tol: f64,
    max_sweeps: usize,
) -> (Vec<f64>, Vec<f64>, f64) {
    let mut current = full_loglik(&beta, &delta, data);
    for _ in 0..max_sweeps {
        let before = current;
        for j in 0..beta_box.map_or(0, |_| beta.len()) {
            let bound = beta_box.unwrap();
            let (x, v) = zoom_search(
                |x| {
                    let mut b = beta.clone();
                    b[j] = x;
                    full_loglik(&b, &delta, data)
                },
                -bound,
                bound,
            );
            if v >= current {
                beta[j] = x;
                current = v;
            }
        }
        for l in 0..delta.len() {
            let (x, v) = zoom_search(
                |x| {
                    let mut d = delta.clone();
                    d[l] = x;
                    full_loglik(&beta, &d, data)
                },
                0.0,
                delta_max,
            );
            if v >= current {
                delta[l] = x;
                current = v;
            }
        }
        if current - before < tol {
            break;
        }
    }
    (beta, delta, current)
}

/// Random subject with times drawn from `times` (nonempty subset, sorted)
/// and cumulative counts with random increments.
pub fn random_subject<R: Rng>(rng: &mut R, id: usize, z: Vec<f64>, times: &[f64], max_jump: u64) -> Subject {
    let mut chosen: Vec<f64> = times.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    if chosen.is_empty() {
        chosen.push(times[rng.gen_range(0..times.len())]);
    }
    let mut total = 0;
    let counts = chosen
        .iter()
        .map(|_| {
            total += rng.gen_range(0..=max_jump);
            total
        })
        .collect();
    Subject::new(format!("s{id}"), z, chosen, counts).unwrap()
}

/// Weighted isotonic regression by the max–min formula
/// `f_i = max_{s≤i} min_{t≥i} Av(s..t)`.
pub fn maxmin(y: &[f64], w: &[f64]) -> Vec<f64> {
    let m = y.len();
    (0..m)
        .map(|i| {
            (0..=i)
                .map(|s| {
                    (i..m)
                        .map(|t| {
                            let sw: f64 = w[s..=t].iter().sum();
                            let swy: f64 = (s..=t).map(|k| w[k] * y[k]).sum();
                            swy / sw
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
