//! Grids, sampled curves, L2 inner products, and Gram matrices.
//!
//! Curves are function samples on a uniform grid over `[t_start, t_end]`;
//! inner products use the composite trapezoid rule, which is spectrally
//! accurate for the periodic cosine curves used throughout. All L2
//! quantities in this crate are therefore quadrature approximations on the
//! declared grid.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{PfrError, Result};

/// Minimum node count accepted for a grid.
pub const MIN_GRID_POINTS: usize = 8;

/// Uniform sampling of an interval: nodes `t_j = t_start + j h` with
/// `h = (t_end - t_start) / (n_points - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(PfrError::invalid(format!(
                "grid endpoints must be finite with t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(PfrError::invalid(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n_points}"
            )));
        }
        Ok(Grid {
            t_start,
            t_end,
            n_points,
        })
    }

    /// Node spacing.
    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    /// The j-th node.
    pub fn node(&self, j: usize) -> f64 {
        self.t_start + j as f64 * self.step()
    }

    /// Iterator over all nodes.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.node(j))
    }

    /// Sample a scalar function on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Curve {
        let values = self.nodes().map(f).collect();
        Curve {
            grid: *self,
            values,
        }
    }

    /// `cos(freq * t)` sampled on the grid; frequency 0 is the constant 1.
    pub fn cosine(&self, freq: u32) -> Curve {
        self.sample(|t| (freq as f64 * t).cos())
    }
}

impl Default for Grid {
    /// `[0, 2π]` with 2048 nodes, the domain of the cosine-process experiment.
    fn default() -> Self {
        Grid {
            t_start: 0.0,
            t_end: 2.0 * std::f64::consts::PI,
            n_points: 2048,
        }
    }
}

/// A function sampled on a [`Grid`]. Values must be finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    grid: Grid,
    values: Vec<f64>,
}

impl Curve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(PfrError::invalid(format!(
                "curve has {} values but grid has {} points",
                values.len(),
                grid.n_points
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(PfrError::invalid(format!(
                "curve value at index {idx} is not finite"
            )));
        }
        Ok(Curve { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute sampled value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Check the declared uniform bound `max |values| <= kappa`.
    pub fn satisfies_bound(&self, kappa: f64) -> bool {
        self.sup_norm() <= kappa
    }
}

/// Trapezoidal quadrature of the pointwise product of two curves.
pub fn l2_inner(a: &Curve, b: &Curve) -> Result<f64> {
    if a.grid != b.grid {
        return Err(PfrError::GridMismatch(
            "l2_inner requires both curves on one grid".into(),
        ));
    }
    Ok(inner_raw(&a.values, &b.values, a.grid.step()))
}

fn inner_raw(a: &[f64], b: &[f64], h: f64) -> f64 {
    let n = a.len();
    let mut acc = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for i in 1..n - 1 {
        acc += a[i] * b[i];
    }
    acc * h
}

/// `sqrt(l2_inner(a, a))`.
pub fn l2_norm(a: &Curve) -> f64 {
    inner_raw(&a.values, &a.values, a.grid.step()).max(0.0).sqrt()
}

/// Symmetric matrix of pairwise L2 inner products of training curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, s: usize) -> f64 {
        self.entries[i * self.n + s]
    }

    /// Entries as a dense row-major slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Build the Gram matrix of a curve set. Each entry is computed once and
/// mirrored, so the result is bitwise symmetric.
pub fn gram(samples: &[Curve]) -> Result<GramMatrix> {
    if samples.is_empty() {
        return Err(PfrError::invalid("gram requires at least one curve"));
    }
    let grid = samples[0].grid;
    if samples.iter().any(|c| c.grid != grid) {
        return Err(PfrError::GridMismatch(
            "gram requires all curves on one grid".into(),
        ));
    }
    let n = samples.len();
    let h = grid.step();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for s in i..n {
            let v = inner_raw(&samples[i].values, &samples[s].values, h);
            entries[i * n + s] = v;
            entries[s * n + i] = v;
        }
    }
    Ok(GramMatrix { n, entries })
}

/// Feature-kernel value `sum_{l=0}^{p} c^l`, evaluated by Horner's rule.
pub fn poly_kernel(c: f64, p: u32) -> f64 {
    debug_assert!(p >= 1);
    let mut acc = 1.0;
    for _ in 0..p {
        acc = 1.0 + c * acc;
    }
    acc
}

/// Bound `kappa_tilde = sum_{l=0}^p kappa^l` induced by a uniform bound
/// `kappa` on the L2 norm of the curves. With `||X_i|| <= kappa` every
/// feature norm `poly_kernel(c_ii, p)^{1/2}` is at most `kappa_tilde`.
pub fn kappa_tilde(kappa: f64, p: u32) -> f64 {
    poly_kernel(kappa, p)
}

/// Write a curve set as CSV: a `# grid,t_start,t_end,n_points` header row,
/// then one row of comma-separated values per curve.
pub fn write_curves_csv<W: Write>(mut w: W, samples: &[Curve]) -> Result<()> {
    if samples.is_empty() {
        return Err(PfrError::invalid("cannot write an empty curve set"));
    }
    let g = samples[0].grid;
    writeln!(w, "# grid,{},{},{}", g.t_start, g.t_end, g.n_points)?;
    for c in samples {
        let mut line = String::with_capacity(c.values.len() * 20);
        for (k, v) in c.values.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Read a curve set written by [`write_curves_csv`]. Validates the column
/// count of every row against the header's `n_points`.
pub fn read_curves_csv<R: BufRead>(r: R) -> Result<Vec<Curve>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err("line 1", "empty file"))??;
    let rest = header
        .strip_prefix("# grid,")
        .ok_or_else(|| parse_err("line 1", "expected `# grid,t_start,t_end,n_points`"))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 3 {
        return Err(parse_err("line 1", "header needs t_start,t_end,n_points"));
    }
    let t_start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| parse_err("line 1", format!("bad t_start: {e}")))?;
    let t_end: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| parse_err("line 1", format!("bad t_end: {e}")))?;
    let n_points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| parse_err("line 1", format!("bad n_points: {e}")))?;
    let grid = Grid::new(t_start, t_end, n_points)?;

    let mut curves = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let loc = format!("line {}", idx + 2);
        let mut values = Vec::with_capacity(n_points);
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|e| parse_err(&loc, format!("bad value: {e}")))?;
            values.push(v);
        }
        if values.len() != n_points {
            return Err(parse_err(
                &loc,
                format!("expected {n_points} columns, found {}", values.len()),
            ));
        }
        curves.push(Curve::new(grid, values)?);
    }
    if curves.is_empty() {
        return Err(parse_err("end of file", "no curve rows"));
    }
    Ok(curves)
}

fn parse_err(location: &str, message: impl Into<String>) -> PfrError {
    PfrError::Parse {
        location: location.to_string(),
        message: message.into(),
    }
}
