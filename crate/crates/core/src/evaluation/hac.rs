//! Newey-West t-statistic for the mean of a serially correlated series.
//!
//! `t = mean / sqrt(S / n)` with the Bartlett-kernel long-run variance
//! `S = gamma_0 + 2 * sum_{j=1..L} (1 - j/(L+1)) * gamma_j`, where the
//! autocovariances `gamma_j = (1/n) * sum_{t=j+1..n} (x_t - mean)(x_{t-j} - mean)`
//! use the `1/n` denominator.

use crate::scalar::{mean, Real};

use super::EvaluationError;

/// Plug-in lag rule `floor(4 * (n/100)^(2/9))`.
pub fn default_nw_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

pub fn newey_west_tstat<F: Real>(series: &[F], lags: usize) -> Result<F, EvaluationError> {
    let n = series.len();
    if n <= lags {
        return Err(EvaluationError::LagsTooLarge { lags, n });
    }
    let long_run = bartlett_long_run_variance(series, lags);
    if long_run <= F::zero() {
        return Err(EvaluationError::DegenerateVariance);
    }
    let m = mean(series);
    Ok(m / (long_run / F::from_usize(n)).sqrt())
}

/// Bartlett-weighted long-run variance `S` (shared with the OLS HAC code).
pub(crate) fn bartlett_long_run_variance<F: Real>(series: &[F], lags: usize) -> F {
    let n = series.len();
    if series.iter().all(|&x| x == series[0]) {
        return F::zero();
    }
    let m = mean(series);
    let centered: Vec<F> = series.iter().map(|&x| x - m).collect();
    let n_f = F::from_usize(n);

    let gamma = |j: usize| -> F {
        let mut acc = F::zero();
        for t in j..n {
            acc += centered[t] * centered[t - j];
        }
        acc / n_f
    };

    let mut s = gamma(0);
    for j in 1..=lags {
        let weight = F::from_f64(1.0 - j as f64 / (lags as f64 + 1.0));
        s += F::from_f64(2.0) * weight * gamma(j);
    }
    s
}
