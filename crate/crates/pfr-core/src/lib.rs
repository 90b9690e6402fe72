//! Regularized polynomial functional regression (PFR) for scalar responses
//! on functional inputs.
//!
//! A functional sample is a curve sampled on a uniform grid; the regression
//! model is an intercept plus integral terms of degree `1..=p` against tensor
//! powers of the input curve. Everything reduces to the Gram matrix of
//! pairwise L2 inner products of the training curves, so fitting costs are
//! governed by the sample count, not the grid resolution.
//!
//! The crate provides:
//!
//! - [`funcdata`]: grids, curves, trapezoidal L2 inner products, Gram matrices;
//! - [`filters`]: spectral regularization filters (Tikhonov, iterated
//!   Tikhonov, TSVD, Landweber) with numeric qualification checking;
//! - [`solver`]: three interchangeable fit paths (full coefficient system,
//!   reduced system, spectral filtering) plus prediction and serialization;
//! - [`groundtruth`]: closed-form cosine-tensor targets and exact L2 errors
//!   of fitted models against them;
//! - [`simulate`]: a deterministic random-cosine-process data generator with
//!   optional response noise;
//! - [`diagnostics`]: effective dimension, capacity quantities, the
//!   resolution-limit parameter, Monte Carlo excess risk, and convergence
//!   rate exponents;
//! - [`experiment`]: configurable sweeps over (seed, sample count, filter)
//!   with CSV/JSON reporting;
//! - [`plot`]: deterministic SVG line plots of error curves.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod funcdata;
pub mod groundtruth;
pub mod linalg;
pub mod plot;
pub mod simulate;
pub mod solver;

pub use error::{PfrError, Result};
pub use filters::{FilterScheme, FilterSpec, QualificationReport};
pub use funcdata::{gram, l2_inner, l2_norm, poly_kernel, Curve, GramMatrix, Grid};
pub use groundtruth::TruthSpec;
pub use simulate::{Dataset, NoiseKind, NoiseSpec, ProcessSpec};
pub use solver::{FitPath, FitReport, PfrModel};
