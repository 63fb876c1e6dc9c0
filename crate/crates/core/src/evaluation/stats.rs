//! Annualization and Sharpe ratios from monthly return series.

use crate::scalar::{mean, sample_sd, Real};

use super::{EvaluationError, MIN_EVAL_MONTHS};

/// `(12 * mean, sqrt(12) * sample sd)` of a monthly series of at least
/// 24 months.
pub fn annualize<F: Real>(monthly: &[F]) -> Result<(F, F), EvaluationError> {
    if monthly.len() < MIN_EVAL_MONTHS {
        return Err(EvaluationError::TooShort { n: monthly.len(), min: MIN_EVAL_MONTHS });
    }
    let twelve = F::from_f64(12.0);
    Ok((twelve * mean(monthly), twelve.sqrt() * sample_sd(monthly)))
}

/// Annualized Sharpe ratio `sqrt(12) * mean / sd`; `None` when the sample
/// standard deviation is zero.
pub fn sharpe<F: Real>(monthly: &[F]) -> Option<F> {
    let sd = sample_sd(monthly);
    if sd == F::zero() {
        return None;
    }
    Some(F::from_f64(12.0).sqrt() * mean(monthly) / sd)
}
