//! Principal components regression.
//!
//! Top-k components of the column-centered design (right singular vectors,
//! obtained as eigenvectors of the centered Gram matrix), OLS of the target
//! on the component scores, then a back-map to per-feature weights. The sign
//! of each loading vector is fixed so its entry of largest magnitude (first
//! index on ties) is nonnegative, which makes fitted weights reproducible.

use std::collections::BTreeMap;

use crate::linalg::{dot, symmetric_eigen, Mat};
use crate::scalar::Real;

use super::{LinearModel, Method, PredictorError};

pub fn fit_pcr<F: Real>(x: &Mat<F>, y: &[F], k: usize) -> Result<LinearModel<F>, PredictorError> {
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

    let mut xc = x.clone();
    let x_means = xc.center_columns();
    let y_mean = crate::scalar::mean(y);
    let yc: Vec<F> = y.iter().map(|&v| v - y_mean).collect();

    let gram = xc.gram();
    let (eigenvalues, eigenvectors) = symmetric_eigen(&gram);

    // Numeric rank: eigenvalues above a relative tolerance.
    let max_eig = eigenvalues.first().copied().unwrap_or(F::zero()).max(F::zero());
    let tol = max_eig * F::from_f64(1e-10);
    let rank = eigenvalues.iter().filter(|&&v| v > tol).count();
    if k > rank {
        return Err(PredictorError::KExceedsRank { k, rank });
    }

    // Loadings with the deterministic sign convention.
    let mut loadings: Vec<Vec<F>> = Vec::with_capacity(k);
    for comp in 0..k {
        let mut v = eigenvectors.column(comp);
        let mut lead = 0usize;
        for (i, val) in v.iter().enumerate() {
            if val.abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < F::zero() {
            for e in &mut v {
                *e = -*e;
            }
        }
        loadings.push(v);
    }

    // Scores are orthogonal, so the OLS coefficients decouple per component.
    let mut weights = vec![F::zero(); p];
    for loading in &loadings {
        let scores = xc.mul_vec(loading);
        let ss = dot(&scores, &scores);
        if ss <= F::zero() {
            continue;
        }
        let beta = dot(&scores, &yc) / ss;
        for (w, &l) in weights.iter_mut().zip(loading) {
            *w += beta * l;
        }
    }

    let mut intercept = y_mean;
    for (&w, &m) in weights.iter().zip(&x_means) {
        intercept -= w * m;
    }

    let mut hyperparams = BTreeMap::new();
    hyperparams.insert("k".to_string(), k as f64);
    Ok(LinearModel {
        intercept,
        weights,
        method: Method::Pcr,
        hyperparams,
        warning: None,
    })
}
