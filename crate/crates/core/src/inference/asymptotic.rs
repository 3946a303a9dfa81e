//! Asymptotic covariance matrices of the two estimators in the reference
//! simulation scenarios.
//!
//! Both reduce to rational multiples of `W⁻¹` (plus a `W⁻¹ W̃ W⁻¹` term
//! under the frailty scenario), where
//!
//! ```text
//! W  = E{ e^{β₀ᵀZ}  (Z − m)(Z − m)ᵀ },   m = E(Z e^{β₀ᵀZ}) / E(e^{β₀ᵀZ})
//! W̃ = E{ e^{2β₀ᵀZ} (Z − m)(Z − m)ᵀ }
//! ```
//!
//! with `Z₁ ~ Unif(0,1)`, `Z₂ ~ N(0,1)`, `Z₃ ~ Bernoulli(0.5)` independent.
//! The expectations use a product rule: Gauss–Legendre on [0, 1],
//! Gauss–Hermite for the standard normal, and exact enumeration of Z₃.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::generate::Scenario;

/// Scale of W⁻¹ in the pseudo-likelihood covariance.
pub const PSEUDO_POISSON: f64 = 1582.0 / 17787.0;
/// Scale of W⁻¹ in the likelihood covariance.
pub const FULL_POISSON: f64 = 1260.0 / 19179.0;
/// Scale of W⁻¹W̃W⁻¹ in the pseudo-likelihood covariance under frailty.
pub const PSEUDO_FRAILTY: f64 = 463.12 / 17787.0;
/// Scale of W⁻¹W̃W⁻¹ in the likelihood covariance under frailty.
pub const FULL_FRAILTY: f64 = 7_917_588.0 / (19179.0 * 19179.0);

pub const DEFAULT_NODES: usize = 40;

/// Product quadrature for the scenario covariate law.
#[derive(Debug, Clone)]
pub struct CovariateQuadrature {
    uniform: Vec<(f64, f64)>,
    normal: Vec<(f64, f64)>,
}

impl CovariateQuadrature {
    pub fn new(uniform_nodes: usize, normal_nodes: usize) -> Result<Self> {
        let nz = |n: usize| NonZeroUsize::new(n).ok_or_else(|| Error::input("quadrature needs at least one node"));
        let uniform = GaussLegendre::new(nz(uniform_nodes)?)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| ((x + 1.0) / 2.0, w / 2.0))
            .collect();
        // physicists' rule: E f(Z) = π^{-1/2} Σ w f(√2 x)
        let norm = std::f64::consts::PI.sqrt();
        let normal = GaussHermite::new(nz(normal_nodes)?)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w / norm))
            .collect();
        Ok(CovariateQuadrature { uniform, normal })
    }

    /// Weighted points `(z, probability)` of the product rule.
    fn points(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.uniform.iter().flat_map(move |&(u, wu)| {
            self.normal.iter().flat_map(move |&(g, wg)| {
                [0.0, 1.0].into_iter().map(move |b| ([u, g, b], wu * wg * 0.5))
            })
        })
    }

    /// `E{ e^{power·βᵀZ} (Z − m)(Z − m)ᵀ }` with the tilted centering m.
    pub fn tilted_covariance(&self, beta: &[f64; 3], power: f64) -> DMatrix<f64> {
        let eta = |z: &[f64; 3]| z.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>();
        let (mut m0, mut m1) = (0.0, DVector::<f64>::zeros(3));
        for (z, p) in self.points() {
            let w = p * eta(&z).exp();
            m0 += w;
            m1 += DVector::from_row_slice(&z) * w;
        }
        let center = m1 / m0;
        let mut out = DMatrix::zeros(3, 3);
        for (z, p) in self.points() {
            let d = DVector::from_row_slice(&z) - &center;
            out += &d * d.transpose() * (p * (power * eta(&z)).exp());
        }
        symmetrize(out)
    }
}

impl Default for CovariateQuadrature {
    fn default() -> Self {
        CovariateQuadrature::new(DEFAULT_NODES, DEFAULT_NODES).expect("positive node counts")
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn beta3(beta0: &[f64]) -> Result<[f64; 3]> {
    beta0
        .try_into()
        .map_err(|_| Error::input(format!("scenario covariates have dimension 3, got {}", beta0.len())))
}

/// W (or W̃ when `tilde`) at `beta0` with the default quadrature.
pub fn covariance_w(beta0: &[f64], tilde: bool) -> Result<DMatrix<f64>> {
    covariance_w_with(&CovariateQuadrature::default(), beta0, tilde)
}

pub fn covariance_w_with(quad: &CovariateQuadrature, beta0: &[f64], tilde: bool) -> Result<DMatrix<f64>> {
    let beta = beta3(beta0)?;
    Ok(quad.tilted_covariance(&beta, if tilde { 2.0 } else { 1.0 }))
}

/// Asymptotic covariance matrices of √n(β̂ − β₀) for both estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticCov {
    pub pseudo: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

impl AsymptoticCov {
    /// Asymptotic standard errors `sqrt(diag(Σ) / n)` for (pseudo, full).
    pub fn ase(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let se = |m: &DMatrix<f64>| m.diagonal().iter().map(|v| (v / n as f64).sqrt()).collect();
        (se(&self.pseudo), se(&self.full))
    }
}

fn inverse(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    w.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numerical("W is singular".into()))
}

pub fn scenario1_cov_with(quad: &CovariateQuadrature, beta0: &[f64]) -> Result<AsymptoticCov> {
    let w_inv = inverse(&covariance_w_with(quad, beta0, false)?)?;
    Ok(AsymptoticCov {
        pseudo: symmetrize(&w_inv * PSEUDO_POISSON),
        full: symmetrize(&w_inv * FULL_POISSON),
    })
}

pub fn scenario2_cov_with(quad: &CovariateQuadrature, beta0: &[f64]) -> Result<AsymptoticCov> {
    let w_inv = inverse(&covariance_w_with(quad, beta0, false)?)?;
    let w_tilde = covariance_w_with(quad, beta0, true)?;
    let sandwich = &w_inv * w_tilde * w_inv.transpose();
    Ok(AsymptoticCov {
        pseudo: symmetrize(&w_inv * PSEUDO_POISSON + &sandwich * PSEUDO_FRAILTY),
        full: symmetrize(&w_inv * FULL_POISSON + &sandwich * FULL_FRAILTY),
    })
}

/// Conditionally Poisson scenario.
pub fn scenario1_cov(beta0: &[f64]) -> Result<AsymptoticCov> {
    scenario1_cov_with(&CovariateQuadrature::default(), beta0)
}

/// Mixed Poisson (frailty) scenario.
pub fn scenario2_cov(beta0: &[f64]) -> Result<AsymptoticCov> {
    scenario2_cov_with(&CovariateQuadrature::default(), beta0)
}

pub fn scenario_cov(scenario: Scenario, beta0: &[f64]) -> Result<AsymptoticCov> {
    match scenario {
        Scenario::One => scenario1_cov(beta0),
        Scenario::Two => scenario2_cov(beta0),
    }
}
