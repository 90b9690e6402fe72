//! Closed-form regression targets in a cosine-tensor representation.
//!
//! A target of order `p` is a tuple `(u_0, ..., u_p)` where each degree-l
//! component is a sum of separable cosine tensors
//! `coef * cos(f_1 s_1) ... cos(f_l s_l)` on `[0, 2π]^l`. Orthogonality of
//! the cosine family makes norms and inner products against fitted models
//! exact up to quadrature, with no l-dimensional grids needed at any order.

use serde::{Deserialize, Serialize};

use crate::error::{PfrError, Result};
use crate::funcdata::{l2_inner, Curve};
use crate::solver::PfrModel;

/// One separable term `c * prod_j cos(f_j s_j)`. Frequency 0 denotes the
/// constant function 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTerm {
    pub c: f64,
    pub f: Vec<u32>,
}

/// A closed-form target `(u_0, ..., u_p)`; `terms[l]` lists the degree-l
/// cosine tensors. Degree 0 is the scalar intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub p: u32,
    pub terms: Vec<Vec<TruthTerm>>,
}

/// L2 weight of `cos(f t)` on `[0, 2π]`: `2π` for the constant, `π` otherwise.
pub fn cosine_weight(freq: u32) -> f64 {
    if freq == 0 {
        2.0 * std::f64::consts::PI
    } else {
        std::f64::consts::PI
    }
}

impl TruthSpec {
    /// The intercept-plus-quadratic target used by the simulation study:
    /// `u_0 = 2`, `u_1 = 1 + cos t + cos 5t`, `u_2 = cos 2t cos 2τ`.
    pub fn standard_quadratic() -> Self {
        TruthSpec {
            p: 2,
            terms: vec![
                vec![TruthTerm { c: 2.0, f: vec![] }],
                vec![
                    TruthTerm { c: 1.0, f: vec![0] },
                    TruthTerm { c: 1.0, f: vec![1] },
                    TruthTerm { c: 1.0, f: vec![5] },
                ],
                vec![TruthTerm {
                    c: 1.0,
                    f: vec![2, 2],
                }],
            ],
        }
    }

    /// The linear restriction of [`standard_quadratic`](Self::standard_quadratic):
    /// same intercept and degree-1 component, no quadratic part.
    pub fn standard_linear() -> Self {
        let q = Self::standard_quadratic();
        TruthSpec {
            p: 1,
            terms: q.terms[..2].to_vec(),
        }
    }

    /// Re-declare the same target at a higher order by appending empty
    /// degree components.
    pub fn padded_to_order(&self, p: u32) -> Result<Self> {
        if p < self.p {
            return Err(PfrError::invalid(format!(
                "cannot pad order {} down to {p}",
                self.p
            )));
        }
        let mut terms = self.terms.clone();
        terms.resize((p + 1) as usize, vec![]);
        Ok(TruthSpec { p, terms })
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.len() != (self.p + 1) as usize {
            return Err(PfrError::invalid(format!(
                "truth of order {} must list {} degree components, found {}",
                self.p,
                self.p + 1,
                self.terms.len()
            )));
        }
        for (l, terms) in self.terms.iter().enumerate() {
            for t in terms {
                if t.f.len() != l {
                    return Err(PfrError::invalid(format!(
                        "degree-{l} term has {} frequencies",
                        t.f.len()
                    )));
                }
                if !t.c.is_finite() {
                    return Err(PfrError::invalid("non-finite truth coefficient"));
                }
            }
            // canonical form: distinct frequency vectors per degree
            for (a, ta) in terms.iter().enumerate() {
                for tb in terms.iter().skip(a + 1) {
                    if ta.f == tb.f {
                        return Err(PfrError::invalid(format!(
                            "degree-{l} has duplicate frequency vector {:?}",
                            ta.f
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The scalar component `u_0` (sum of degree-0 coefficients).
    pub fn u0(&self) -> f64 {
        self.terms[0].iter().map(|t| t.c).sum()
    }

    pub fn degree_terms(&self, l: u32) -> &[TruthTerm] {
        &self.terms[l as usize]
    }

    /// Analytic `||u_l||^2` on `[0, 2π]^l` by cosine orthogonality.
    pub fn l2_norm_sq(&self, l: u32) -> Result<f64> {
        if l > self.p {
            return Err(PfrError::invalid(format!(
                "degree {l} out of range for order {}",
                self.p
            )));
        }
        Ok(self.terms[l as usize]
            .iter()
            .map(|t| t.c * t.c * t.f.iter().map(|&f| cosine_weight(f)).product::<f64>())
            .sum())
    }
}

/// Per-curve inner products against every cosine frequency a truth needs,
/// shared by the error and projection computations below.
fn curve_cosine_inners(model: &PfrModel, freqs: &[u32]) -> Result<Vec<Vec<f64>>> {
    let grid = model.grid();
    let mut out = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let cosine = grid.cosine(f);
        let mut per_curve = Vec::with_capacity(model.training_curves().len());
        for c in model.training_curves() {
            per_curve.push(l2_inner(c, &cosine)?);
        }
        out.push(per_curve);
    }
    Ok(out)
}

fn freq_index(freqs: &[u32], f: u32) -> usize {
    freqs.iter().position(|&x| x == f).unwrap()
}

/// Exact L2 distance between a fitted model and a closed-form target,
/// computed on the Gram expansion:
/// `E_0 = (b_0 - u_0)^2` and, for each degree l,
/// `E_l = sum_{i,j} b_i b_j c_ij^l - 2 sum_i b_i m_i + ||u_l||^2`, where
/// `m_i` pairs the i-th training curve with the degree-l truth terms.
/// Tiny negative degree contributions from cancellation are clamped at 0.
pub fn model_truth_error(model: &PfrModel, truth: &TruthSpec) -> Result<f64> {
    truth.validate()?;
    if model.order() != truth.p {
        return Err(PfrError::invalid(format!(
            "model order {} does not match truth order {}",
            model.order(),
            truth.p
        )));
    }
    let mut freqs: Vec<u32> = truth
        .terms
        .iter()
        .flat_map(|ts| ts.iter().flat_map(|t| t.f.iter().copied()))
        .collect();
    freqs.sort_unstable();
    freqs.dedup();
    let inners = curve_cosine_inners(model, &freqs)?;

    let b = model.coefficients();
    let n = b.len();
    let gram = model.gram();
    let mut total = (model.intercept() - truth.u0()).powi(2);
    for l in 1..=truth.p {
        let norm_sq = truth.l2_norm_sq(l)?;
        // quadratic part: sum_{ij} b_i b_j c_ij^l, contracted through the
        // eigendecomposition of the degree-l Gram power. Near-interpolating
        // fits carry huge mutually-cancelling coefficients along null
        // directions; the direct double sum loses the value to absolute
        // rounding, while sigma_k (v_k . b)^2 squares only after the
        // cancellation has happened inside each linear contraction.
        let mut cl = crate::linalg::Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                cl[(i, j)] = gram.get(i, j).powi(l as i32);
            }
        }
        let eig = crate::linalg::sym_eigen(&cl)?;
        let mut quad = 0.0;
        for (k, &sigma) in eig.values.iter().enumerate() {
            if sigma <= 0.0 {
                continue;
            }
            let mut proj = 0.0;
            for i in 0..n {
                proj += eig.vectors[(i, k)] * b[i];
            }
            quad += sigma * proj * proj;
        }
        // cross part: sum_i b_i m_i^{(l)}
        let mut cross = 0.0;
        for (i, bi) in b.iter().enumerate() {
            let mut m_i = 0.0;
            for term in truth.degree_terms(l) {
                let mut prod = term.c;
                for &f in &term.f {
                    prod *= inners[freq_index(&freqs, f)][i];
                }
                m_i += prod;
            }
            cross += bi * m_i;
        }
        let e_l = quad - 2.0 * cross + norm_sq;
        // cancellation noise scales with the magnitudes being cancelled
        // (near-interpolating fits carry large mutually-cancelling terms);
        // the clamp below absorbs it, the assert only catches formula-level
        // sign errors
        debug_assert!(
            e_l >= -1e-6 * norm_sq.max(1.0).max(quad.abs()),
            "degree-{l} error {e_l} far below roundoff scale"
        );
        total += e_l.max(0.0);
    }
    Ok(total.sqrt())
}

/// Coefficient of the cosine tensor `prod_j cos(f_j s_j)` in the fitted
/// degree-l component: the inner product of the expansion with the tensor,
/// divided by the tensor's squared norm.
pub fn cosine_projection(model: &PfrModel, l: u32, frequencies: &[u32]) -> Result<f64> {
    if l == 0 {
        return Err(PfrError::invalid(
            "cosine_projection needs degree l >= 1; the intercept is read directly",
        ));
    }
    if l > model.order() {
        return Err(PfrError::invalid(format!(
            "degree {l} out of range for model order {}",
            model.order()
        )));
    }
    if frequencies.len() != l as usize {
        return Err(PfrError::invalid(format!(
            "degree {l} projection needs {l} frequencies, got {}",
            frequencies.len()
        )));
    }
    let grid = model.grid();
    let b = model.coefficients();
    let mut inners: Vec<Vec<f64>> = Vec::with_capacity(frequencies.len());
    for &f in frequencies {
        let cosine = grid.cosine(f);
        inners.push(
            model
                .training_curves()
                .iter()
                .map(|c| l2_inner(c, &cosine))
                .collect::<Result<_>>()?,
        );
    }
    let mut acc = 0.0;
    for (i, bi) in b.iter().enumerate() {
        let mut prod = *bi;
        for per_curve in &inners {
            prod *= per_curve[i];
        }
        acc += prod;
    }
    let weight: f64 = frequencies.iter().map(|&f| cosine_weight(f)).product();
    Ok(acc / weight)
}

/// Response evaluator for a fixed target and grid; caches the sampled
/// cosine curves so repeated evaluations only pay for inner products.
pub struct TruthResponses {
    truth: TruthSpec,
    freqs: Vec<u32>,
    cosines: Vec<Curve>,
}

impl TruthResponses {
    pub fn new(truth: &TruthSpec, grid: &crate::funcdata::Grid) -> Self {
        let mut freqs: Vec<u32> = truth
            .terms
            .iter()
            .skip(1)
            .flat_map(|ts| ts.iter().flat_map(|t| t.f.iter().copied()))
            .collect();
        freqs.sort_unstable();
        freqs.dedup();
        let cosines = freqs.iter().map(|&f| grid.cosine(f)).collect();
        TruthResponses {
            truth: truth.clone(),
            freqs,
            cosines,
        }
    }

    /// `u_0` plus, for each degree-l term, `coef * prod_j <x, cos(f_j .)>`.
    /// Exact for separable targets up to quadrature.
    pub fn eval(&self, x: &Curve) -> Result<f64> {
        let mut inner_of = Vec::with_capacity(self.freqs.len());
        for cosine in &self.cosines {
            inner_of.push(l2_inner(x, cosine)?);
        }
        let mut acc = self.truth.u0();
        for terms in self.truth.terms.iter().skip(1) {
            for term in terms {
                let mut prod = term.c;
                for &f in &term.f {
                    prod *= inner_of[freq_index(&self.freqs, f)];
                }
                acc += prod;
            }
        }
        Ok(acc)
    }
}

/// Evaluate the target's response on a curve. One-shot form of
/// [`TruthResponses`].
pub fn response_from_truth(truth: &TruthSpec, x: &Curve) -> f64 {
    TruthResponses::new(truth, x.grid())
        .eval(x)
        .expect("cosines sampled on the curve's own grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn norms_of_standard_target() {
        let t = TruthSpec::standard_quadratic();
        t.validate().unwrap();
        assert_eq!(t.l2_norm_sq(0).unwrap(), 4.0);
        assert!((t.l2_norm_sq(1).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((t.l2_norm_sq(2).unwrap() - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_malformed() {
        let bad = TruthSpec {
            p: 1,
            terms: vec![vec![TruthTerm { c: 1.0, f: vec![] }]],
        };
        assert!(bad.validate().is_err());
        let dup = TruthSpec {
            p: 1,
            terms: vec![
                vec![],
                vec![
                    TruthTerm { c: 1.0, f: vec![2] },
                    TruthTerm { c: 3.0, f: vec![2] },
                ],
            ],
        };
        assert!(dup.validate().is_err());
    }

    #[test]
    fn json_shape_matches_interface() {
        let t = TruthSpec::standard_quadratic();
        let s = serde_json::to_string(&t).unwrap();
        let back: TruthSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
        let parsed: TruthSpec = serde_json::from_str(
            r#"{"p":2,"terms":[[{"c":2,"f":[]}],[{"c":1,"f":[0]},{"c":1,"f":[1]},{"c":1,"f":[5]}],[{"c":1,"f":[2,2]}]]}"#,
        )
        .unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn padded_target_keeps_low_degrees() {
        let lin = TruthSpec::standard_linear();
        let padded = lin.padded_to_order(2).unwrap();
        padded.validate().unwrap();
        assert_eq!(padded.l2_norm_sq(2).unwrap(), 0.0);
        assert_eq!(padded.u0(), 2.0);
    }
}
