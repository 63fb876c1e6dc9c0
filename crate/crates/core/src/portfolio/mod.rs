//! Portfolio construction and accounting: decile sorts, point and
//! uncertainty-adjusted long-short spreads, benchmark-relative long-only
//! legs, turnover, proportional transaction costs, and net-value paths.

mod accounting;
mod construct;
mod deciles;
mod series_build;

use std::collections::BTreeMap;

use thiserror::Error;

pub use accounting::{apply_costs, compute_turnover, realize, scale_path};
pub use construct::{build_long_only, build_long_short, point_long_short, ua_long_short, SortMode};
pub use deciles::assign_deciles;
pub use series_build::{
    bound_scores_by_month, long_only_series, point_scores_by_month, point_spread_series,
    ua_spread_series, BoundScores,
};

use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

/// Default proportional transaction cost: 20 basis points per unit of
/// one-way turnover.
pub const DEFAULT_COST_RATE: f64 = 0.0020;

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("decile sort needs at least 10 assets with finite scores, got {n}")]
    TooFewAssets { n: usize },
    #[error("benchmark return missing for month {month}")]
    MissingBenchmark { month: MonthId },
    #[error("held asset {asset} has no realized return in month {month}")]
    MissingReturn { asset: AssetId, month: MonthId },
    #[error("net-value paths have different lengths: {left} vs {right}")]
    PathLengthMismatch { left: usize, right: usize },
    #[error("terminal net value is zero; cannot scale")]
    ZeroTerminal,
    #[error("no months to realize")]
    EmptyWeights,
}

/// Which score ordered a decile sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScoreKind {
    Point,
    Upper,
    Lower,
}

impl std::fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScoreKind::Point => "point",
            ScoreKind::Upper => "upper",
            ScoreKind::Lower => "lower",
        })
    }
}

/// A partition of one month's scored universe into deciles 1..=10,
/// where decile 10 holds the top scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecileAssignment {
    pub month: MonthId,
    pub score_name: ScoreKind,
    pub mapping: BTreeMap<AssetId, u8>,
    /// Assets dropped for non-finite scores before sorting.
    pub n_nonfinite_excluded: usize,
}

impl DecileAssignment {
    pub fn members(&self, decile: u8) -> Vec<&AssetId> {
        self.mapping.iter().filter(|(_, &d)| d == decile).map(|(a, _)| a).collect()
    }
}

/// Per-month target weights of one strategy.
pub type MonthWeights<F> = BTreeMap<AssetId, F>;

/// Realized monthly accounting of one strategy leg or spread.
///
/// `nav[t] = nav[t-1] * (1 + net_returns[t])` with `nav` starting from 1
/// before the first month.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSeries<F> {
    pub strategy_id: String,
    pub months: Vec<MonthId>,
    pub weights: Vec<MonthWeights<F>>,
    pub gross_returns: Vec<F>,
    pub turnover: Vec<F>,
    pub net_returns: Vec<F>,
    pub nav: Vec<F>,
}

impl<F: Real> PortfolioSeries<F> {
    pub fn n_months(&self) -> usize {
        self.months.len()
    }

    pub fn terminal_nav(&self) -> F {
        self.nav.last().copied().unwrap_or_else(F::one)
    }
}
