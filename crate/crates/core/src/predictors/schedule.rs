//! Annual rolling train/validation/test scheduler.
//!
//! The first split trains on the earliest `train_years`, validates on the
//! next `val_years`, and tests on the following calendar year; every later
//! split shifts all three ranges forward by 12 months, so the just-tested
//! year moves into validation and the oldest training year drops out.

use crate::panel::MonthId;

use super::PredictorError;

/// One train/validation/test triple of contiguous, adjacent month ranges
/// (inclusive endpoints), strictly ordered train < validation < test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollingSplit {
    pub id: String,
    pub train: (MonthId, MonthId),
    pub validation: (MonthId, MonthId),
    pub test: (MonthId, MonthId),
}

impl RollingSplit {
    /// The train+validation window the calibration folds partition.
    pub fn window(&self) -> (MonthId, MonthId) {
        (self.train.0, self.validation.1)
    }

    pub fn test_months(&self) -> Vec<MonthId> {
        self.test.0.range_to(self.test.1)
    }
}

pub fn rolling_schedule(
    month_index: &[MonthId],
    train_years: usize,
    val_years: usize,
) -> Result<Vec<RollingSplit>, PredictorError> {
    let n_months = month_index.len();
    let available_years = n_months / 12;
    let required_years = train_years + val_years + 1;
    if train_years == 0 || val_years == 0 || available_years < required_years {
        return Err(PredictorError::InsufficientSpan { required_years, available_years });
    }

    let first = month_index[0];
    let last = *month_index.last().expect("non-empty month index");
    let train_len = 12 * train_years as i32;
    let val_len = 12 * val_years as i32;

    let mut splits = Vec::new();
    let mut shift = 0i32;
    loop {
        let train_start = first.offset(shift);
        let train_end = train_start.offset(train_len - 1);
        let val_start = train_end.offset(1);
        let val_end = val_start.offset(val_len - 1);
        let test_start = val_end.offset(1);
        let test_end = test_start.offset(11);
        if test_end > last {
            break;
        }
        splits.push(RollingSplit {
            id: format!("w{}", test_start),
            train: (train_start, train_end),
            validation: (val_start, val_end),
            test: (test_start, test_end),
        });
        shift += 12;
    }
    Ok(splits)
}
