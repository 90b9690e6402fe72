//! Small dense linear algebra: LU solves and symmetric eigendecomposition.
//!
//! The coefficient systems here are tiny (at most a few hundred unknowns),
//! so a partial-pivoting LU and a cyclic Jacobi eigensolver are all that is
//! needed. Both are deterministic: the same input bytes produce the same
//! output bytes on every run.

use crate::error::{PfrError, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, reusable across right-hand sides.
pub struct LuFactors {
    lu: Mat,
    perm: Vec<usize>,
}

/// Factor a square matrix; fails on exact singularity (zero pivot).
pub fn lu_factor(a: &Mat) -> Result<LuFactors> {
    if a.rows != a.cols {
        return Err(PfrError::invalid(format!(
            "lu_factor requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // pick the largest pivot in column k
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(PfrError::SolveFailure(format!(
                "singular matrix: zero pivot in column {k}"
            )));
        }
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    /// Solve `A x = b` using the stored factorization.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&pi| b[pi]).collect();
        // forward substitution (unit lower triangle)
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}

/// Convenience one-shot solve.
pub fn lu_solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    Ok(lu_factor(a)?.solve(b))
}

/// Eigendecomposition of a symmetric matrix.
///
/// `values[k]` is the k-th eigenvalue in nonincreasing order and the k-th
/// column of `vectors` is its eigenvector. `A = V diag(values) V^T`.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Only the lower/upper symmetry of the input is assumed; the strictly lower
/// triangle is ignored. Iterates sweeps until the off-diagonal mass is at
/// rounding level relative to the Frobenius norm.
pub fn sym_eigen(a: &Mat) -> Result<SymEigen> {
    if a.rows != a.cols {
        return Err(PfrError::invalid(format!(
            "sym_eigen requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(SymEigen {
            values: vec![],
            vectors: Mat::zeros(0, 0),
        });
    }
    let mut m = a.clone();
    // symmetrize from the upper triangle so roundoff asymmetry cannot bias sweeps
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m[(i, j)];
            m[(j, i)] = v;
        }
    }
    let mut v = Mat::identity(n);
    let fro: f64 = m.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = if fro > 0.0 { 1e-15 * fro } else { 0.0 };

    let off = |m: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };

    let max_sweeps = 64;
    let mut sweep = 0;
    while off(&m) > tol && sweep < max_sweeps {
        sweep += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[(i, p)];
                        let aiq = m[(i, q)];
                        let new_ip = aip - s * (aiq + tau * aip);
                        let new_iq = aiq + s * (aip - tau * aiq);
                        m[(i, p)] = new_ip;
                        m[(p, i)] = new_ip;
                        m[(i, q)] = new_iq;
                        m[(q, i)] = new_iq;
                    }
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip - s * (viq + tau * vip);
                    v[(i, q)] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    if off(&m) > tol.max(1e-12 * fro) {
        return Err(PfrError::SolveFailure(
            "Jacobi eigendecomposition did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort by descending eigenvalue keeps ties deterministic
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(SymEigen { values, vectors })
}

impl SymEigen {
    /// Apply the spectral function `f` to the decomposed matrix:
    /// returns `V f(Λ) V^T y`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, y: &[f64]) -> Vec<f64> {
        let n = self.values.len();
        assert_eq!(y.len(), n);
        // z = V^T y
        let mut z = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += self.vectors[(i, k)] * y[i];
            }
            z[k] = acc;
        }
        for (k, zk) in z.iter_mut().enumerate() {
            *zk *= f(self.values[k]);
        }
        // out = V z
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += self.vectors[(i, k)] * z[k];
            }
            out[i] = acc;
        }
        out
    }
}
