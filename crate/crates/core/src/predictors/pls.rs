//! Partial least squares (single response, NIPALS-style).
//!
//! Components are extracted sequentially: each weight vector is proportional
//! to `X^T y` on the deflated data and unit-normalized, so every direction
//! maximizes covariance with the remaining target variation. The final model
//! is back-mapped to original-feature weights via `W (P^T W)^{-1} c`.

use std::collections::BTreeMap;

use crate::linalg::{dot, solve_square, Mat};
use crate::scalar::Real;

use super::{LinearModel, Method, ModelWarning, PredictorError};

pub fn fit_pls<F: Real>(x: &Mat<F>, y: &[F], k: usize) -> Result<LinearModel<F>, PredictorError> {
    let n = x.rows();
    let p = x.cols();
    if n < 2 {
        return Err(PredictorError::TooFewRows { n });
    }
    if k == 0 {
        return Err(PredictorError::ZeroComponents);
    }
    for c in 0..p {
        if x.column(c).iter().any(|v| !v.is_finite()) {
            return Err(PredictorError::NonFiniteColumn { col: c });
        }
    }

    let mut e = x.clone();
    let x_means = e.center_columns();
    let y_mean = crate::scalar::mean(y);
    let mut f: Vec<F> = y.iter().map(|&v| v - y_mean).collect();

    // Covariance scale at the start; directions below a relative tolerance of
    // it count as zero covariance and stop the extraction early.
    let initial = e.tr_mul_vec(&f);
    let initial_norm = dot(&initial, &initial).sqrt();
    let cov_tol = F::from_f64(1e-12) * initial_norm.max(F::one());

    let mut w_vecs: Vec<Vec<F>> = Vec::new();
    let mut p_vecs: Vec<Vec<F>> = Vec::new();
    let mut c_loadings: Vec<F> = Vec::new();

    for _ in 0..k {
        let mut w = e.tr_mul_vec(&f);
        let w_norm = dot(&w, &w).sqrt();
        if w_norm <= cov_tol {
            break;
        }
        for v in &mut w {
            *v /= w_norm;
        }
        let t = e.mul_vec(&w);
        let tt = dot(&t, &t);
        if tt <= F::from_f64(1e-300) {
            break;
        }
        let c = dot(&t, &f) / tt;
        let p_vec: Vec<F> = {
            let raw = e.tr_mul_vec(&t);
            raw.into_iter().map(|v| v / tt).collect()
        };
        // Deflate.
        for r in 0..n {
            let tr = t[r];
            let row = e.row_mut(r);
            for (ev, &pv) in row.iter_mut().zip(&p_vec) {
                *ev -= tr * pv;
            }
            f[r] -= c * tr;
        }
        w_vecs.push(w);
        p_vecs.push(p_vec);
        c_loadings.push(c);
    }

    let achieved = w_vecs.len();
    let weights = if achieved == 0 {
        vec![F::zero(); p]
    } else {
        // B = W (P^T W)^{-1} c
        let mut ptw = Mat::zeros(achieved, achieved);
        for (i, pv) in p_vecs.iter().enumerate() {
            for (j, wv) in w_vecs.iter().enumerate() {
                ptw.set(i, j, dot(pv, wv));
            }
        }
        let beta = solve_square(&ptw, &c_loadings).map_err(|_| PredictorError::KExceedsRank {
            k,
            rank: achieved.saturating_sub(1),
        })?;
        let mut weights = vec![F::zero(); p];
        for (wv, &b) in w_vecs.iter().zip(&beta) {
            for (out, &v) in weights.iter_mut().zip(wv) {
                *out += b * v;
            }
        }
        weights
    };

    let mut intercept = y_mean;
    for (&w, &m) in weights.iter().zip(&x_means) {
        intercept -= w * m;
    }

    let mut hyperparams = BTreeMap::new();
    hyperparams.insert("k".to_string(), k as f64);
    Ok(LinearModel {
        intercept,
        weights,
        method: Method::Pls,
        hyperparams,
        warning: if achieved < k {
            Some(ModelWarning::EarlyStop { achieved, requested: k })
        } else {
            None
        },
    })
}
