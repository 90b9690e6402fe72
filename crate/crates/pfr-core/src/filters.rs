//! One-parameter spectral regularization filters.
//!
//! A scheme supplies `g_lambda(sigma)`, an approximation of `1/sigma`
//! controlled by the regularization parameter `lambda`, with residual
//! `r_lambda(sigma) = 1 - sigma g_lambda(sigma)`. The qualification of a
//! scheme is the largest power `q` with `sup |r_lambda(sigma) sigma^q|`
//! of order `lambda^q`; it limits how much target smoothness the scheme
//! can exploit. Tikhonov has qualification 1, its q-fold iteration has
//! qualification q.

use serde::{Deserialize, Serialize};

use crate::error::{PfrError, Result};

/// The supported filter families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterScheme {
    Tikhonov,
    IteratedTikhonov,
    Tsvd,
    Landweber,
}

impl std::fmt::Display for FilterScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FilterScheme::Tikhonov => "tikhonov",
            FilterScheme::IteratedTikhonov => "iterated_tikhonov",
            FilterScheme::Tsvd => "tsvd",
            FilterScheme::Landweber => "landweber",
        };
        f.write_str(s)
    }
}

/// A regularization scheme with its parameters.
///
/// `iterations` is the iteration count for `iterated_tikhonov` and the step
/// count for `landweber`; it is ignored by the other schemes.
/// `step_size` applies to `landweber` only and must keep
/// `step_size * sigma_max < 1` on the spectrum it is used with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub scheme: FilterScheme,
    pub lambda: f64,
    #[serde(default = "default_iterations")]
    pub iterations: u32,
    #[serde(default = "default_step_size", skip_serializing_if = "is_default_step")]
    pub step_size: f64,
}

fn default_iterations() -> u32 {
    1
}

fn default_step_size() -> f64 {
    1.0
}

fn is_default_step(s: &f64) -> bool {
    *s == 1.0
}

impl FilterSpec {
    pub fn tikhonov(lambda: f64) -> Self {
        FilterSpec {
            scheme: FilterScheme::Tikhonov,
            lambda,
            iterations: 1,
            step_size: 1.0,
        }
    }

    pub fn iterated_tikhonov(lambda: f64, iterations: u32) -> Self {
        FilterSpec {
            scheme: FilterScheme::IteratedTikhonov,
            lambda,
            iterations,
            step_size: 1.0,
        }
    }

    pub fn tsvd(lambda: f64) -> Self {
        FilterSpec {
            scheme: FilterScheme::Tsvd,
            lambda,
            iterations: 1,
            step_size: 1.0,
        }
    }

    pub fn landweber(lambda: f64, iterations: u32, step_size: f64) -> Self {
        FilterSpec {
            scheme: FilterScheme::Landweber,
            lambda,
            iterations,
            step_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(PfrError::invalid(format!(
                "filter lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.iterations == 0 {
            return Err(PfrError::invalid("filter iterations must be >= 1"));
        }
        if self.scheme == FilterScheme::Landweber && !(self.step_size > 0.0) {
            return Err(PfrError::invalid("landweber step_size must be positive"));
        }
        Ok(())
    }

    /// Nominal qualification of the scheme: 1 for Tikhonov, the iteration
    /// count for the iterated scheme and Landweber, unbounded for TSVD.
    pub fn nominal_qualification(&self) -> f64 {
        match self.scheme {
            FilterScheme::Tikhonov => 1.0,
            FilterScheme::IteratedTikhonov | FilterScheme::Landweber => self.iterations as f64,
            FilterScheme::Tsvd => f64::INFINITY,
        }
    }
}

/// Evaluate the filter and its residual together.
///
/// Both values are computed with relative accuracy: naive evaluation of
/// either `(1 - rho^q)/sigma` (filter, small sigma) or `1 - sigma g`
/// (residual, small lambda) cancels catastrophically, and the residual's
/// relative accuracy is what the qualification check amplifies by
/// `(sigma/lambda)^q`.
pub fn filter_pair(spec: &FilterSpec, sigma: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(PfrError::invalid(format!(
            "filter evaluation requires sigma >= 0, got {sigma}"
        )));
    }
    let lambda = spec.lambda;
    Ok(match spec.scheme {
        FilterScheme::Tikhonov => {
            let denom = sigma + lambda;
            (1.0 / denom, lambda / denom)
        }
        FilterScheme::IteratedTikhonov => {
            // factor 1 - rho^q = (1 - rho) sum_j rho^j with
            // rho = lambda/(lambda+sigma) and 1 - rho = sigma/(lambda+sigma);
            // the geometric sum gives the filter without dividing by sigma
            // (the sigma -> 0 limit q/lambda falls out), and the running
            // power gives the residual rho^q without subtracting from 1
            let rho = lambda / (lambda + sigma);
            let mut geom = 0.0;
            let mut pw = 1.0;
            for _ in 0..spec.iterations {
                geom += pw;
                pw *= rho;
            }
            (geom / (lambda + sigma), pw)
        }
        FilterScheme::Tsvd => {
            if sigma >= lambda {
                (1.0 / sigma, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
        FilterScheme::Landweber => {
            // sum_{j < iterations} step (1 - step sigma)^j, summed directly
            let a = spec.step_size;
            let base = 1.0 - a * sigma;
            let mut acc = 0.0;
            let mut pw = 1.0;
            for _ in 0..spec.iterations {
                acc += a * pw;
                pw *= base;
            }
            (acc, pw)
        }
    })
}

/// Evaluate `g_lambda(sigma)`.
pub fn filter_value(spec: &FilterSpec, sigma: f64) -> Result<f64> {
    Ok(filter_pair(spec, sigma)?.0)
}

/// Evaluate the residual `r_lambda(sigma) = 1 - sigma * g_lambda(sigma)`.
pub fn residual_value(spec: &FilterSpec, sigma: f64) -> Result<f64> {
    Ok(filter_pair(spec, sigma)?.1)
}

/// Observed filter constants on a probe grid; see [`check_qualification`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QualificationReport {
    /// The claimed qualification the residual was tested against.
    pub q: f64,
    /// `sup |r_lambda(sigma)| sigma^q / lambda^q` over the probe grid.
    pub gamma_q: f64,
    /// `sup |r_lambda(sigma)|`.
    pub gamma_0: f64,
    /// `sup lambda |g_lambda(sigma)|`.
    pub gamma_minus1: f64,
    /// `sup sqrt(lambda sigma) |g_lambda(sigma)|`.
    pub gamma_minus_half: f64,
}

impl QualificationReport {
    /// A scheme of qualification `q` keeps `gamma_q` of order one; a large
    /// observed constant signals that `q` exceeds the true qualification.
    pub fn exceeds_qualification(&self) -> bool {
        self.gamma_q > 10.0
    }
}

/// Evaluate the filter and residual on a log-spaced grid over
/// `(0, sigma_max]` and report the observed sup constants.
pub fn check_qualification(
    spec: &FilterSpec,
    q: f64,
    sigma_max: f64,
    n_probe: usize,
) -> Result<QualificationReport> {
    spec.validate()?;
    if !(q > 0.0) {
        return Err(PfrError::invalid("qualification q must be positive"));
    }
    if !(sigma_max > 0.0) {
        return Err(PfrError::invalid("sigma_max must be positive"));
    }
    if n_probe < 100 {
        return Err(PfrError::invalid("need at least 100 probe points"));
    }
    // 16 decades below sigma_max down to the rounding floor of the spectrum
    let log_hi = sigma_max.log10();
    let log_lo = log_hi - 16.0;
    let lambda = spec.lambda;
    let mut gamma_q = 0.0_f64;
    let mut gamma_0 = 0.0_f64;
    let mut gamma_minus1 = 0.0_f64;
    let mut gamma_minus_half = 0.0_f64;
    for i in 0..n_probe {
        let f = i as f64 / (n_probe - 1) as f64;
        let sigma = 10f64.powf(log_lo + f * (log_hi - log_lo));
        let (g, r) = filter_pair(spec, sigma)?;
        // (sigma/lambda)^q first: sigma^q alone can underflow for small
        // probe points at high q
        gamma_q = gamma_q.max((r * (sigma / lambda).powf(q)).abs());
        gamma_0 = gamma_0.max(r.abs());
        gamma_minus1 = gamma_minus1.max(lambda * g.abs());
        gamma_minus_half = gamma_minus_half.max((lambda * sigma).sqrt() * g.abs());
    }
    Ok(QualificationReport {
        q,
        gamma_q,
        gamma_0,
        gamma_minus1,
        gamma_minus_half,
    })
}
