//! Chronological K-fold partition of a training+validation window.

use crate::panel::MonthId;

use super::CalibrationError;

/// Contiguous, non-overlapping month blocks covering a window in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldScheme {
    pub k: usize,
    /// Inclusive month ranges, chronological; sizes differ by at most one.
    pub folds: Vec<(MonthId, MonthId)>,
}

impl FoldScheme {
    /// Fold index (0-based) containing a month, if any.
    pub fn fold_of(&self, month: MonthId) -> Option<usize> {
        self.folds.iter().position(|&(lo, hi)| lo <= month && month <= hi)
    }
}

/// Partition `[start, end]` into `K` contiguous folds: fold `j` (1-based)
/// holds months `floor((j-1)*L/K)+1 ..= floor(j*L/K)` of the window.
pub fn make_time_folds(
    start: MonthId,
    end: MonthId,
    k: usize,
) -> Result<FoldScheme, CalibrationError> {
    let window_len = (end.0 - start.0 + 1).max(0) as usize;
    if k < 3 {
        return Err(CalibrationError::TooFewFolds { k });
    }
    if k > window_len {
        return Err(CalibrationError::WindowTooShort { k, window_len });
    }
    let mut folds = Vec::with_capacity(k);
    for j in 1..=k {
        let lo = (j - 1) * window_len / k; // floor((j-1)L/K)
        let hi = j * window_len / k; // floor(jL/K)
        folds.push((start.offset(lo as i32), start.offset(hi as i32 - 1)));
    }
    Ok(FoldScheme { k, folds })
}
