//! Factor-model alphas with Newey-West standard errors.
//!
//! OLS of monthly strategy returns on an intercept plus factor returns; the
//! covariance of the coefficient vector is the HAC sandwich over the OLS
//! moment conditions `u_t * x_t` with the same Bartlett kernel as
//! [`super::newey_west_tstat`].

use crate::linalg::{spd_inverse, Mat};
use crate::scalar::{mean, Real};

use super::{newey_west_tstat, EvaluationError};

/// Monthly alpha (intercept) and its Newey-West t-statistic.
///
/// Identically-zero factor columns are dropped; if none survive, the
/// regression collapses to the intercept-only case and reproduces
/// `(mean, newey_west_tstat)` exactly.
pub fn factor_alpha<F: Real>(
    series: &[F],
    factor_rows: &[Vec<F>],
    lags: usize,
) -> Result<(F, F), EvaluationError> {
    let n = series.len();
    assert_eq!(factor_rows.len(), n, "factor rows must align with the series");
    if n <= lags {
        return Err(EvaluationError::LagsTooLarge { lags, n });
    }

    let n_factors = factor_rows.first().map_or(0, Vec::len);
    let live: Vec<usize> = (0..n_factors)
        .filter(|&j| factor_rows.iter().any(|r| r[j] != F::zero()))
        .collect();

    if live.is_empty() {
        let alpha = mean(series);
        let t = newey_west_tstat(series, lags)?;
        return Ok((alpha, t));
    }

    let p = live.len() + 1;
    let rows: Vec<Vec<F>> = factor_rows
        .iter()
        .map(|r| {
            let mut row = Vec::with_capacity(p);
            row.push(F::one());
            row.extend(live.iter().map(|&j| r[j]));
            row
        })
        .collect();
    let x = Mat::from_rows(&rows);
    let gram = x.gram();
    let gram_inv = spd_inverse(&gram).map_err(|_| EvaluationError::RankDeficientFactors)?;
    let xty = x.tr_mul_vec(series);
    let beta: Vec<F> = (0..p)
        .map(|i| (0..p).map(|j| gram_inv.get(i, j) * xty[j]).sum())
        .collect();

    // Residual scores g_t = u_t * x_t.
    let fitted = x.mul_vec(&beta);
    let scores: Vec<Vec<F>> = (0..n)
        .map(|t| {
            let u = series[t] - fitted[t];
            x.row(t).iter().map(|&v| u * v).collect()
        })
        .collect();

    // S = Gamma_0 + sum_j w_j (Gamma_j + Gamma_j'), Gamma_j with 1/n.
    let n_f = F::from_usize(n);
    let mut s = Mat::zeros(p, p);
    for t in 0..n {
        for a in 0..p {
            for b in 0..p {
                let v = s.get(a, b) + scores[t][a] * scores[t][b] / n_f;
                s.set(a, b, v);
            }
        }
    }
    for j in 1..=lags {
        let weight = F::from_f64(1.0 - j as f64 / (lags as f64 + 1.0));
        for t in j..n {
            for a in 0..p {
                for b in 0..p {
                    let gj = scores[t][a] * scores[t - j][b] / n_f;
                    let gj_t = scores[t - j][a] * scores[t][b] / n_f;
                    let v = s.get(a, b) + weight * (gj + gj_t);
                    s.set(a, b, v);
                }
            }
        }
    }

    // V = (X'X)^{-1} (n S) (X'X)^{-1}
    let mut v00 = F::zero();
    for a in 0..p {
        for b in 0..p {
            v00 += gram_inv.get(0, a) * s.get(a, b) * gram_inv.get(b, 0);
        }
    }
    v00 *= n_f;
    if v00 <= F::zero() {
        return Err(EvaluationError::DegenerateVariance);
    }
    let alpha = beta[0];
    Ok((alpha, alpha / v00.sqrt()))
}
