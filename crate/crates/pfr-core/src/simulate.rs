//! Synthetic data generation: a random cosine process, closed-form
//! responses, and additive response noise.
//!
//! All randomness comes from a counter-based generator keyed by
//! `(seed, stream, index, coordinate)`, so any draw is a pure function of
//! its key. Growing a dataset from N to N+1 samples leaves the first N
//! samples untouched, which keeps error curves over a sample-size sweep
//! internally consistent.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{PfrError, Result};
use crate::funcdata::{Curve, Grid};
use crate::groundtruth::{TruthResponses, TruthSpec};

pub use crate::groundtruth::response_from_truth;

/// Distinct draw streams, so coefficients, noise, and evaluation draws
/// never collide under one seed.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Coefficients = 1,
    Noise = 2,
    Evaluation = 3,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(seed: u64, stream: Stream, index: u64, coord: u64) -> u64 {
    let mut z = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    z = mix64(z ^ (stream as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
    z = mix64(z ^ index.wrapping_mul(0xa076_1d64_78bd_642f));
    mix64(z ^ coord.wrapping_mul(0xe703_7ed1_a0b4_28db))
}

/// Uniform draw in `[0, 1)` for a key.
pub fn uniform01(seed: u64, stream: Stream, index: u64, coord: u64) -> f64 {
    (key(seed, stream, index, coord) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform_sym(seed: u64, stream: Stream, index: u64, coord: u64, bound: f64) -> f64 {
    bound * (2.0 * uniform01(seed, stream, index, coord) - 1.0)
}

/// Standard normal via Box-Muller on two counter draws. The first uniform
/// is shifted into `(0, 1]` so the logarithm is always finite.
fn gaussian(seed: u64, stream: Stream, index: u64) -> f64 {
    let u1 = ((key(seed, stream, index, 0) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = uniform01(seed, stream, index, 1);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// The random cosine process `X(t) = sum_{k=0}^{K} xi_k cos(k t)` with
/// i.i.d. coefficients uniform on `[-coefficient_bound, coefficient_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    /// Highest cosine frequency K.
    pub max_frequency: u32,
    /// Half-width of the uniform coefficient distribution.
    pub coefficient_bound: f64,
    pub grid: Grid,
}

impl ProcessSpec {
    pub fn new(max_frequency: u32, coefficient_bound: f64, grid: Grid) -> Result<Self> {
        if !(coefficient_bound > 0.0) {
            return Err(PfrError::invalid("coefficient_bound must be positive"));
        }
        Ok(ProcessSpec {
            max_frequency,
            coefficient_bound,
            grid,
        })
    }

    /// The frequency-0..=5, bound-1 process on the default grid.
    pub fn standard() -> Self {
        ProcessSpec {
            max_frequency: 5,
            coefficient_bound: 1.0,
            grid: Grid::default(),
        }
    }

    /// Uniform sup-norm bound on generated curves:
    /// `(K+1) * coefficient_bound`.
    pub fn kappa_sup(&self) -> f64 {
        (self.max_frequency + 1) as f64 * self.coefficient_bound
    }

    /// Uniform L2-norm bound on generated curves over `[0, 2π]`.
    pub fn kappa_l2(&self) -> f64 {
        let pi = std::f64::consts::PI;
        let norm_sq =
            self.coefficient_bound * self.coefficient_bound * (2.0 + self.max_frequency as f64) * pi;
        norm_sq.sqrt()
    }

    /// `sum_{l=0}^{p} kappa^l` for the declared L2 bound.
    pub fn kappa_tilde(&self, p: u32) -> f64 {
        crate::funcdata::kappa_tilde(self.kappa_l2(), p)
    }

    fn cosine_basis(&self) -> Vec<Curve> {
        (0..=self.max_frequency).map(|k| self.grid.cosine(k)).collect()
    }

    fn xi_row(&self, seed: u64, index: u64) -> Vec<f64> {
        (0..=self.max_frequency as u64)
            .map(|k| uniform_sym(seed, Stream::Coefficients, index, k, self.coefficient_bound))
            .collect()
    }

    fn curve_from_xi(&self, xi: &[f64], basis: &[Curve]) -> Curve {
        let mut values = vec![0.0; self.grid.n_points];
        for (coef, base) in xi.iter().zip(basis) {
            for (v, b) in values.iter_mut().zip(base.values()) {
                *v += coef * b;
            }
        }
        Curve::new(self.grid, values).expect("finite combination of cosines")
    }

    /// Draw the i-th curve of the stream for `seed`, independent of how many
    /// other curves were drawn.
    pub fn draw_one(&self, seed: u64, index: u64) -> (Curve, Vec<f64>) {
        self.sampler().draw(seed, index)
    }

    /// A reusable sampler that holds the sampled cosine basis, for callers
    /// drawing many curves.
    pub fn sampler(&self) -> ProcessSampler {
        ProcessSampler {
            spec: *self,
            basis: self.cosine_basis(),
        }
    }
}

/// Caches the cosine basis of a process so repeated draws cost only the
/// coefficient synthesis.
pub struct ProcessSampler {
    spec: ProcessSpec,
    basis: Vec<Curve>,
}

impl ProcessSampler {
    pub fn draw(&self, seed: u64, index: u64) -> (Curve, Vec<f64>) {
        let xi = self.spec.xi_row(seed, index);
        (self.spec.curve_from_xi(&xi, &self.basis), xi)
    }
}

/// Additive response noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    Gaussian,
    BoundedUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Variance of the Gaussian variant.
    #[serde(default = "default_sigma_sq")]
    pub sigma_sq: f64,
    /// Half-width of the bounded-uniform variant.
    #[serde(default)]
    pub bound: f64,
}

fn default_sigma_sq() -> f64 {
    1e-3
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            sigma_sq: default_sigma_sq(),
            bound: 0.0,
        }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn gaussian(sigma_sq: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::Gaussian,
            sigma_sq,
            bound: 0.0,
        }
    }

    pub fn bounded_uniform(bound: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::BoundedUniform,
            sigma_sq: 0.0,
            bound,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_sq < 0.0 {
            return Err(PfrError::invalid("noise variance must be nonnegative"));
        }
        Ok(())
    }
}

/// A generated training set: curves, their drawn coefficients, and clean
/// plus noisy responses.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub curves: Vec<Curve>,
    pub xi: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
    pub clean_responses: Vec<f64>,
    pub seed: u64,
}

/// Draw `n` curves (and their coefficient rows) from the process.
/// Deterministic: the same seed reproduces the same bytes, and the first
/// `n` samples of a longer draw equal a shorter draw.
pub fn draw_process(spec: &ProcessSpec, n: usize, seed: u64) -> Result<(Vec<Curve>, Vec<Vec<f64>>)> {
    if n < 1 {
        return Err(PfrError::invalid("need n >= 1 samples"));
    }
    let basis = spec.cosine_basis();
    let mut curves = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    for i in 0..n {
        let row = spec.xi_row(seed, i as u64);
        curves.push(spec.curve_from_xi(&row, &basis));
        xi.push(row);
    }
    Ok((curves, xi))
}

/// Closed-form response of the standard experiment for a length-6
/// coefficient row: `2 + π² ξ_2² + π (2 ξ_0 + ξ_1 + ξ_5)`.
pub fn response_oracle(xi_row: &[f64]) -> Result<f64> {
    if xi_row.len() != 6 {
        return Err(PfrError::invalid(format!(
            "response_oracle expects 6 coefficients, got {}",
            xi_row.len()
        )));
    }
    let pi = std::f64::consts::PI;
    Ok(2.0 + pi * pi * xi_row[2] * xi_row[2] + pi * (2.0 * xi_row[0] + xi_row[1] + xi_row[5]))
}

/// Add response noise. The `none` kind returns the input bitwise.
pub fn add_noise(clean: &[f64], spec: &NoiseSpec, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(match spec.kind {
        NoiseKind::None => clean.to_vec(),
        NoiseKind::Gaussian => {
            let sd = spec.sigma_sq.sqrt();
            clean
                .iter()
                .enumerate()
                .map(|(i, y)| y + sd * gaussian(seed, Stream::Noise, i as u64))
                .collect()
        }
        NoiseKind::BoundedUniform => clean
            .iter()
            .enumerate()
            .map(|(i, y)| y + uniform_sym(seed, Stream::Noise, i as u64, 0, spec.bound))
            .collect(),
    })
}

/// Compose process draw, truth responses, and noise into a dataset.
pub fn make_dataset(
    process: &ProcessSpec,
    truth: &TruthSpec,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    truth.validate()?;
    let (curves, xi) = draw_process(process, n, seed)?;
    let evaluator = TruthResponses::new(truth, &process.grid);
    let clean_responses: Vec<f64> = curves
        .iter()
        .map(|c| evaluator.eval(c))
        .collect::<Result<_>>()?;
    let responses = add_noise(&clean_responses, noise, seed)?;
    Ok(Dataset {
        curves,
        xi,
        responses,
        clean_responses,
        seed,
    })
}

/// Companion CSV to the curve-set file: one row per sample with the noisy
/// and clean responses and the drawn coefficients.
pub fn write_responses_csv<W: Write>(mut w: W, dataset: &Dataset) -> Result<()> {
    let k = dataset.xi.first().map(|r| r.len()).unwrap_or(0);
    let mut header = String::from("index,y,y_clean");
    for j in 0..k {
        header.push_str(&format!(",xi_{j}"));
    }
    header.push_str(",seed");
    writeln!(w, "{header}")?;
    for i in 0..dataset.curves.len() {
        let mut line = format!("{i},{},{}", dataset.responses[i], dataset.clean_responses[i]);
        for v in &dataset.xi[i] {
            line.push_str(&format!(",{v}"));
        }
        line.push_str(&format!(",{}", dataset.seed));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Read the `y` column of a responses CSV written by
/// [`write_responses_csv`].
pub fn read_responses_csv<R: std::io::BufRead>(r: R) -> Result<Vec<f64>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| PfrError::Parse {
        location: "line 1".into(),
        message: "empty responses file".into(),
    })??;
    let cols: Vec<&str> = header.split(',').collect();
    let y_col = cols
        .iter()
        .position(|c| *c == "y")
        .ok_or_else(|| PfrError::Parse {
            location: "line 1".into(),
            message: "missing `y` column".into(),
        })?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let field = fields.get(y_col).ok_or_else(|| PfrError::Parse {
            location: format!("line {}", i + 2),
            message: "short row".into(),
        })?;
        out.push(field.trim().parse().map_err(|e| PfrError::Parse {
            location: format!("line {}", i + 2),
            message: format!("bad response: {e}"),
        })?);
    }
    if out.is_empty() {
        return Err(PfrError::Parse {
            location: "end of file".into(),
            message: "no response rows".into(),
        });
    }
    Ok(out)
}
