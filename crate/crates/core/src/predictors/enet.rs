//! Elastic Net by cyclic coordinate descent with soft-thresholding.
//!
//! Minimizes `(1/2n) * sum((y - Xw - b)^2) + lambda1 * sum(|w|)
//! + (lambda2/2) * sum(w^2)` with an unpenalized intercept. The intercept is
//! handled by centering: for any `w` the optimal `b` is
//! `mean(y) - mean_x . w`, so descent runs on centered data and the objective
//! is nonincreasing across sweeps.

use std::collections::BTreeMap;

use crate::linalg::Mat;
use crate::scalar::Real;

use super::{LinearModel, Method, ModelWarning, PredictorError};

#[derive(Debug, Clone, Copy)]
pub struct EnetParams {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Convergence tolerance on the largest coordinate change per sweep.
    pub tol: f64,
    /// Maximum number of full coordinate sweeps.
    pub max_sweeps: usize,
}

impl Default for EnetParams {
    fn default() -> Self {
        Self { lambda1: 0.0, lambda2: 0.0, tol: 1e-7, max_sweeps: 10_000 }
    }
}

/// Full Elastic Net objective at `(w, b)`.
pub fn enet_objective<F: Real>(x: &Mat<F>, y: &[F], w: &[F], b: F, lambda1: f64, lambda2: f64) -> F {
    let n = F::from_usize(x.rows());
    let fitted = x.mul_vec(w);
    let mut sse = F::zero();
    for (f, &t) in fitted.iter().zip(y) {
        let e = t - *f - b;
        sse += e * e;
    }
    let l1: F = w.iter().map(|v| v.abs()).sum();
    let l2: F = w.iter().map(|&v| v * v).sum();
    sse / (F::from_f64(2.0) * n)
        + F::from_f64(lambda1) * l1
        + F::from_f64(lambda2) / F::from_f64(2.0) * l2
}

/// Fit with the default tolerance (1e-7) and sweep cap (10 000).
pub fn fit_enet<F: Real>(
    x: &Mat<F>,
    y: &[F],
    lambda1: f64,
    lambda2: f64,
) -> Result<LinearModel<F>, PredictorError> {
    let params = EnetParams { lambda1, lambda2, ..EnetParams::default() };
    fit_enet_traced(x, y, &params).map(|(m, _)| m)
}

/// Fit and also return the objective value after each sweep, which tests use
/// to assert monotone descent.
pub fn fit_enet_traced<F: Real>(
    x: &Mat<F>,
    y: &[F],
    params: &EnetParams,
) -> Result<(LinearModel<F>, Vec<F>), PredictorError> {
    let n = x.rows();
    let p = x.cols();
    if n < 2 {
        return Err(PredictorError::TooFewRows { n });
    }
    for c in 0..p {
        if x.column(c).iter().any(|v| !v.is_finite()) {
            return Err(PredictorError::NonFiniteColumn { col: c });
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(PredictorError::NonFiniteColumn { col: p });
    }

    let n_f = F::from_usize(n);
    let mut xc = x.clone();
    let x_means = xc.center_columns();
    let y_mean = crate::scalar::mean(y);
    let yc: Vec<F> = y.iter().map(|&v| v - y_mean).collect();

    // Per-column (1/n) * ||x_j||^2 on the centered design.
    let col_scale: Vec<F> = (0..p)
        .map(|j| xc.column(j).iter().map(|&v| v * v).sum::<F>() / n_f)
        .collect();

    let lambda1 = F::from_f64(params.lambda1);
    let lambda2 = F::from_f64(params.lambda2);
    let tol = F::from_f64(params.tol);

    let mut w = vec![F::zero(); p];
    let mut residual = yc.clone();
    let mut objectives = Vec::new();
    let mut converged = false;
    let mut sweeps = 0usize;

    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut max_delta = F::zero();
        for j in 0..p {
            let denom = col_scale[j] + lambda2;
            if denom <= F::zero() {
                continue; // constant column: weight stays 0
            }
            // rho = (1/n) x_j . (residual + x_j * w_j)
            let mut xj_dot_r = F::zero();
            for r in 0..n {
                xj_dot_r += xc.get(r, j) * residual[r];
            }
            let rho = xj_dot_r / n_f + col_scale[j] * w[j];
            let new_w = soft_threshold(rho, lambda1) / denom;
            let delta = new_w - w[j];
            if delta != F::zero() {
                for r in 0..n {
                    let v = residual[r] - xc.get(r, j) * delta;
                    residual[r] = v;
                }
                w[j] = new_w;
            }
            max_delta = max_delta.max(delta.abs());
        }
        let b = intercept_for(&w, &x_means, y_mean);
        objectives.push(enet_objective(x, y, &w, b, params.lambda1, params.lambda2));
        if max_delta < tol {
            converged = true;
            break;
        }
    }

    let intercept = intercept_for(&w, &x_means, y_mean);
    let mut hyperparams = BTreeMap::new();
    hyperparams.insert("lambda1".to_string(), params.lambda1);
    hyperparams.insert("lambda2".to_string(), params.lambda2);

    let model = LinearModel {
        intercept,
        weights: w,
        method: Method::Enet,
        hyperparams,
        warning: if converged { None } else { Some(ModelWarning::NotConverged { sweeps }) },
    };
    Ok((model, objectives))
}

#[inline]
fn soft_threshold<F: Real>(z: F, gamma: F) -> F {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        F::zero()
    }
}

fn intercept_for<F: Real>(w: &[F], x_means: &[F], y_mean: F) -> F {
    let mut b = y_mean;
    for (&wj, &mj) in w.iter().zip(x_means) {
        b -= wj * mj;
    }
    b
}
