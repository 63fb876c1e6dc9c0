//! Minimal dense linear algebra used by the solvers.
//!
//! A row-major matrix type plus the three kernels the crate needs: normal
//! equations assembly, Cholesky solves, and a cyclic Jacobi eigendecomposition
//! for symmetric matrices. Design widths in this domain are small (tens of
//! columns), so dense O(p^3) routines are the right tool.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular or not positive definite at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// `X^T X`, symmetric `cols x cols`.
    pub fn gram(&self) -> Mat<F> {
        let p = self.cols;
        let mut g = Mat::zeros(p, p);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..p {
                let xi = row[i];
                if xi == F::zero() {
                    continue;
                }
                for j in i..p {
                    let v = g.get(i, j) + xi * row[j];
                    g.set(i, j, v);
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                let v = g.get(j, i);
                g.set(i, j, v);
            }
        }
        g
    }

    /// `X^T y`.
    pub fn tr_mul_vec(&self, y: &[F]) -> Vec<F> {
        assert_eq!(y.len(), self.rows, "X^T y length mismatch");
        let mut out = vec![F::zero(); self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            let yr = y[r];
            for (o, &x) in out.iter_mut().zip(row) {
                *o += x * yr;
            }
        }
        out
    }

    /// `X w`.
    pub fn mul_vec(&self, w: &[F]) -> Vec<F> {
        assert_eq!(w.len(), self.cols, "X w length mismatch");
        (0..self.rows).map(|r| dot(self.row(r), w)).collect()
    }

    /// Subtract the column mean from every column; returns the means.
    pub fn center_columns(&mut self) -> Vec<F> {
        let n = F::from_usize(self.rows.max(1));
        let mut means = vec![F::zero(); self.cols];
        for r in 0..self.rows {
            for (m, &x) in means.iter_mut().zip(self.row(r)) {
                *m += x;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        for r in 0..self.rows {
            let row = self.row_mut(r);
            for (x, &m) in row.iter_mut().zip(&means) {
                *x -= m;
            }
        }
        means
    }
}

#[inline]
pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solve `A x = b` for symmetric positive definite `A` via Cholesky.
///
/// Fails with `NotPositiveDefinite` when a pivot drops below a scale-relative
/// tolerance, which is how callers detect rank deficiency.
pub fn cholesky_solve<F: Real>(a: &Mat<F>, b: &[F]) -> Result<Vec<F>, LinalgError> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            context: format!("cholesky: A is {}x{}, b has {}", a.rows(), a.cols(), b.len()),
        });
    }
    let max_diag = (0..n)
        .map(|i| a.get(i, i).abs())
        .fold(F::zero(), |acc, v| acc.max(v));
    let tol = F::from_f64(1e-12) * max_diag.max(F::one());

    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= tol {
                    return Err(LinalgError::NotPositiveDefinite { pivot: i });
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![F::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    Ok(x)
}

/// Invert a symmetric positive definite matrix via Cholesky column solves.
pub fn spd_inverse<F: Real>(a: &Mat<F>) -> Result<Mat<F>, LinalgError> {
    let n = a.rows();
    let mut inv = Mat::zeros(n, n);
    for c in 0..n {
        let mut e = vec![F::zero(); n];
        e[c] = F::one();
        let col = cholesky_solve(a, &e)?;
        for (r, v) in col.into_iter().enumerate() {
            inv.set(r, c, v);
        }
    }
    Ok(inv)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// eigenvector `k` is the `k`-th column of the returned matrix. Deterministic
/// for a fixed input.
pub fn symmetric_eigen<F: Real>(a: &Mat<F>) -> (Vec<F>, Mat<F>) {
    let n = a.rows();
    assert_eq!(a.cols(), n, "symmetric_eigen needs a square matrix");
    let mut s = a.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v.set(i, i, F::one());
    }

    let off = |m: &Mat<F>| -> F {
        let mut acc = F::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m.get(i, j) * m.get(i, j);
                }
            }
        }
        acc
    };

    let eps = F::from_f64(1e-30);
    for _sweep in 0..100 {
        if off(&s) <= eps * F::from_usize(n * n).max(F::one()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s.get(p, q);
                if apq.abs() <= F::from_f64(1e-300) {
                    continue;
                }
                let app = s.get(p, p);
                let aqq = s.get(q, q);
                let theta = (aqq - app) / (F::from_f64(2.0) * apq);
                let t = {
                    let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                    sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let sn = t * c;

                for k in 0..n {
                    let skp = s.get(k, p);
                    let skq = s.get(k, q);
                    s.set(k, p, c * skp - sn * skq);
                    s.set(k, q, sn * skp + c * skq);
                }
                for k in 0..n {
                    let spk = s.get(p, k);
                    let sqk = s.get(q, k);
                    s.set(p, k, c * spk - sn * sqk);
                    s.set(q, k, sn * spk + c * sqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| s.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));

    let values: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_c, v.get(r, old_c));
        }
    }
    (values, vectors)
}

/// Ordinary least squares of `y` on the columns of `x` (no intercept added).
pub fn ols<F: Real>(x: &Mat<F>, y: &[F]) -> Result<Vec<F>, LinalgError> {
    let gram = x.gram();
    let xty = x.tr_mul_vec(y);
    cholesky_solve(&gram, &xty)
}

/// Solve a general square system by Gaussian elimination with partial pivoting.
pub fn solve_square<F: Real>(a: &Mat<F>, b: &[F]) -> Result<Vec<F>, LinalgError> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            context: format!("solve: A is {}x{}, b has {}", a.rows(), a.cols(), b.len()),
        });
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m.get(i, col)
                    .abs()
                    .partial_cmp(&m.get(j, col).abs())
                    .expect("finite pivot")
            })
            .expect("non-empty range");
        if m.get(pivot_row, col).abs() <= F::from_f64(1e-300) {
            return Err(LinalgError::NotPositiveDefinite { pivot: col });
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = m.get(col, c);
                m.set(col, c, m.get(pivot_row, c));
                m.set(pivot_row, c, tmp);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m.get(col, col);
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            if factor == F::zero() {
                continue;
            }
            for c in col..n {
                let v = m.get(r, c) - factor * m.get(col, c);
                m.set(r, c, v);
            }
            rhs[r] = rhs[r] - factor * rhs[col];
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for c in r + 1..n {
            s -= m.get(r, c) * x[c];
        }
        x[r] = s / m.get(r, r);
    }
    Ok(x)
}
