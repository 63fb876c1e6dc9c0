//! Performance evaluation: annualized return and volatility, Sharpe ratios,
//! Newey-West t-statistics, and factor-model alphas, assembled into one
//! report row per strategy.

mod alpha;
mod hac;
mod report;
mod stats;

use std::collections::BTreeMap;

use thiserror::Error;

pub use alpha::factor_alpha;
pub use hac::{default_nw_lags, newey_west_tstat};
pub use report::{build_report, load_factor_table};
pub use stats::{annualize, sharpe};

use crate::panel::MonthId;
use crate::scalar::Real;

pub const MIN_EVAL_MONTHS: usize = 24;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("series has {n} months, need at least {min}")]
    TooShort { n: usize, min: usize },
    #[error("series variance is zero; statistic undefined")]
    DegenerateVariance,
    #[error("lags = {lags} must be smaller than the series length {n}")]
    LagsTooLarge { lags: usize, n: usize },
    #[error("factor matrix is rank deficient")]
    RankDeficientFactors,
    #[error("factor table missing month {month}")]
    FactorCoverage { month: MonthId },
    #[error("factor table must have 3 or 5 factors, got {n}")]
    FactorCountUnsupported { n: usize },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: cannot parse {column}={value:?}")]
    Parse { row: usize, column: String, value: String },
}

/// Monthly factor returns covering the evaluation months.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTable<F> {
    pub factor_names: Vec<String>,
    pub values: BTreeMap<MonthId, Vec<F>>,
}

impl<F: Real> FactorTable<F> {
    /// Factor rows aligned to `months`, erroring on the first gap.
    pub fn aligned(&self, months: &[MonthId]) -> Result<Vec<Vec<F>>, EvaluationError> {
        months
            .iter()
            .map(|m| {
                self.values
                    .get(m)
                    .cloned()
                    .ok_or(EvaluationError::FactorCoverage { month: *m })
            })
            .collect()
    }

    /// Restrict to the first `k` factors (FF3 from a 5-factor file).
    pub fn truncated(&self, k: usize) -> FactorTable<F> {
        FactorTable {
            factor_names: self.factor_names.iter().take(k).cloned().collect(),
            values: self
                .values
                .iter()
                .map(|(m, v)| (*m, v.iter().take(k).copied().collect()))
                .collect(),
        }
    }

    pub fn n_factors(&self) -> usize {
        self.factor_names.len()
    }
}

/// One performance row. `sharpe` and `nw_tstat` are `None` for degenerate
/// (zero-variance) series; alpha fields are populated only for dollar-neutral
/// strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport<F> {
    pub strategy_id: String,
    pub ann_return: F,
    pub ann_vol: F,
    pub sharpe: Option<F>,
    pub nw_tstat: Option<F>,
    pub nw_lags: usize,
    /// Monthly three-factor alpha and its Newey-West t-statistic.
    pub alpha3: Option<(F, F)>,
    /// Monthly five-factor alpha and its Newey-West t-statistic.
    pub alpha5: Option<(F, F)>,
    pub n_months: usize,
}
