//! Quantitative side-quantities of the regression: effective dimension,
//! capacity terms, the resolution-limit parameter, Monte Carlo excess risk,
//! and power-case convergence-rate exponents.
//!
//! The population operator behind these quantities is inaccessible, so
//! everything runs on the empirical spectrum of `K/N` as a plug-in
//! surrogate.

use serde::{Deserialize, Serialize};

use crate::error::{PfrError, Result};
use crate::funcdata::{poly_kernel, GramMatrix};
use crate::groundtruth::{TruthResponses, TruthSpec};
use crate::linalg::{sym_eigen, Mat};
use crate::simulate::ProcessSpec;
use crate::solver::{predict, PfrModel};

/// The empirical spectrum (eigenvalues of `K/N`, nonincreasing, clamped at
/// zero) together with the feature-norm bound `kappa_tilde`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumView {
    eigenvalues: Vec<f64>,
    kappa_tilde: f64,
}

impl SpectrumView {
    /// Build from raw eigenvalues; sorts nonincreasing and clamps rounding
    /// negatives to zero. Values materially below zero are rejected.
    pub fn new(mut eigenvalues: Vec<f64>, kappa_tilde: f64) -> Result<Self> {
        let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = -1e-12 * max_abs.max(1.0);
        if let Some(bad) = eigenvalues.iter().find(|&&v| v < floor) {
            return Err(PfrError::invalid(format!(
                "eigenvalue {bad} is negative beyond rounding tolerance"
            )));
        }
        for v in &mut eigenvalues {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(SpectrumView {
            eigenvalues,
            kappa_tilde,
        })
    }

    /// Spectrum of `K/N` for a Gram matrix and kernel order; `kappa_tilde`
    /// falls back to the largest observed curve norm when no process bound
    /// is supplied.
    pub fn from_gram(gram: &GramMatrix, p: u32, kappa_tilde: Option<f64>) -> Result<Self> {
        let n = gram.len();
        let nf = n as f64;
        let mut kn = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                kn[(i, j)] = poly_kernel(gram.get(i, j), p) / nf;
            }
        }
        let eig = sym_eigen(&kn)?;
        let kt = kappa_tilde.unwrap_or_else(|| {
            let kappa = (0..n).map(|i| gram.get(i, i).max(0.0).sqrt()).fold(0.0_f64, f64::max);
            crate::funcdata::kappa_tilde(kappa, p)
        });
        SpectrumView::new(eig.values, kt)
    }

    pub fn from_model(model: &PfrModel, kappa_tilde: Option<f64>) -> Result<Self> {
        Self::from_gram(model.gram(), model.order(), kappa_tilde)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn kappa_tilde(&self) -> f64 {
        self.kappa_tilde
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Effective dimension `sum_j sigma_j / (lambda + sigma_j)`.
pub fn effective_dimension(spec: &SpectrumView, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(PfrError::invalid("lambda must be positive"));
    }
    Ok(spec
        .eigenvalues
        .iter()
        .map(|&s| s / (lambda + s))
        .sum())
}

/// Capacity term `S(N, lambda) = (2 kt / sqrt(N)) (kt / sqrt(N lambda)
/// + sqrt(effective_dimension))`.
pub fn s_quantity(n: usize, lambda: f64, spec: &SpectrumView) -> Result<f64> {
    if n < 1 {
        return Err(PfrError::invalid("n must be >= 1"));
    }
    let nf = n as f64;
    let kt = spec.kappa_tilde;
    let eff = effective_dimension(spec, lambda)?;
    Ok(2.0 * kt / nf.sqrt() * (kt / (nf * lambda).sqrt() + eff.sqrt()))
}

/// `Upsilon(lambda) = (S / sqrt(lambda))^2 + 1`; at least 1.
pub fn upsilon(n: usize, lambda: f64, spec: &SpectrumView) -> Result<f64> {
    let s = s_quantity(n, lambda, spec)?;
    Ok((s / lambda.sqrt()).powi(2) + 1.0)
}

/// Confidence-scaled operator-ratio bound
/// `Xi = 2 [ (S log(2/delta) / sqrt(lambda))^2 + 1 ]`; at least 2.
pub fn xi_bound(n: usize, lambda: f64, delta: f64, spec: &SpectrumView) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PfrError::invalid("delta must lie in (0, 1)"));
    }
    let s = s_quantity(n, lambda, spec)?;
    let scaled = s * (2.0 / delta).ln() / lambda.sqrt();
    Ok(2.0 * (scaled * scaled + 1.0))
}

/// The resolution limit of `n` samples: the root of
/// `effective_dimension(lambda) / lambda = n`, found by bisection on
/// `log lambda`. The map is strictly decreasing, so the root is unique.
pub fn lambda_star(spec: &SpectrumView, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(PfrError::invalid("n must be >= 1"));
    }
    if spec.max_eigenvalue() <= 0.0 {
        return Err(PfrError::SolveFailure(
            "all-zero spectrum has no resolution limit".into(),
        ));
    }
    let nf = n as f64;
    let ratio = |lambda: f64| -> Result<f64> { Ok(effective_dimension(spec, lambda)? / lambda) };
    let mut lo = 1e-16_f64;
    let mut hi = spec.max_eigenvalue();
    // the root usually sits inside (0, sigma_max]; extend upward if the
    // ratio at sigma_max still exceeds n
    let mut guard = 0;
    while ratio(hi)? > nf && guard < 64 {
        hi *= 10.0;
        guard += 1;
    }
    let tol = 1e-9 * nf;
    let mut best = hi;
    let mut best_res = f64::INFINITY;
    for _ in 0..500 {
        let mid = ((lo.ln() + hi.ln()) / 2.0).exp();
        let r = ratio(mid)?;
        let res = (r - nf).abs();
        if res < best_res {
            best = mid;
            best_res = res;
        }
        if res <= tol {
            return Ok(mid);
        }
        if r > nf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res <= tol {
        Ok(best)
    } else {
        Err(PfrError::SolveFailure(format!(
            "resolution-limit bisection stalled at residual {best_res:.3e}"
        )))
    }
}

/// Monte Carlo excess risk: mean squared gap between the target response
/// and the model prediction over fresh process draws.
pub fn excess_risk_mc(
    model: &PfrModel,
    truth: &TruthSpec,
    process: &ProcessSpec,
    n_mc: usize,
    seed: u64,
) -> Result<f64> {
    if n_mc < 1 {
        return Err(PfrError::invalid("n_mc must be >= 1"));
    }
    if process.grid != *model.grid() {
        return Err(PfrError::GridMismatch(
            "evaluation process must use the training grid".into(),
        ));
    }
    let evaluator = TruthResponses::new(truth, &process.grid);
    let sampler = process.sampler();
    // a distinct stream seed keeps evaluation draws independent of training
    let eval_seed = seed ^ 0x5157_9ab4_0c1a_22d3;
    let mut acc = 0.0;
    for i in 0..n_mc {
        let (x, _) = sampler.draw(eval_seed, i as u64);
        let gap = evaluator.eval(&x)? - predict(model, &x)?;
        acc += gap * gap;
    }
    Ok(acc / n_mc as f64)
}

/// Power-case convergence exponents for source smoothness `r` and capacity
/// decay `theta`: the regularization choice `lambda ~ N^{lambda_exponent}`
/// yields excess risk `N^{risk_exponent}` and estimation error
/// `N^{norm_exponent}`.
pub fn rate_exponent(r: f64, theta: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&r) {
        return Err(PfrError::invalid("smoothness r must lie in [0, 1]"));
    }
    if theta < 0.0 {
        return Err(PfrError::invalid("capacity exponent theta must be >= 0"));
    }
    let denom = 2.0 * r + theta + 1.0;
    Ok((-1.0 / denom, -(2.0 * r + 1.0) / denom, -r / denom))
}
