//! Glue from prediction and bound records to realized monthly series.

use std::collections::BTreeMap;

use crate::calibration::BoundRecord;
use crate::panel::{AssetId, MonthId, PanelDataset};
use crate::predictors::PredictionRecord;
use crate::scalar::Real;

use super::{
    build_long_only, point_long_short, realize, ua_long_short, MonthWeights, PortfolioError,
    PortfolioSeries, ScoreKind,
};

/// Per-month point-score maps from prediction records.
pub fn point_scores_by_month<F: Real>(
    predictions: &[PredictionRecord<F>],
) -> BTreeMap<MonthId, BTreeMap<AssetId, F>> {
    let mut by_month: BTreeMap<MonthId, BTreeMap<AssetId, F>> = BTreeMap::new();
    for p in predictions {
        by_month.entry(p.month).or_default().insert(p.asset.clone(), p.mu_hat);
    }
    by_month
}

/// Per-month `(upper, lower)` score maps from bound records.
pub type BoundScores<F> = BTreeMap<MonthId, (BTreeMap<AssetId, F>, BTreeMap<AssetId, F>)>;

pub fn bound_scores_by_month<F: Real>(bounds: &[BoundRecord<F>]) -> BoundScores<F> {
    let mut by_month: BoundScores<F> = BTreeMap::new();
    for b in bounds {
        let entry = by_month.entry(b.month).or_default();
        entry.0.insert(b.asset.clone(), b.upper);
        entry.1.insert(b.asset.clone(), b.lower);
    }
    by_month
}

/// Monthly-rebalanced point-prediction long-short spread.
pub fn point_spread_series<F: Real>(
    strategy_id: &str,
    predictions: &[PredictionRecord<F>],
    panel: &PanelDataset<F>,
    cost_rate: f64,
) -> Result<PortfolioSeries<F>, PortfolioError> {
    let mut weights: BTreeMap<MonthId, MonthWeights<F>> = BTreeMap::new();
    for (month, scores) in point_scores_by_month(predictions) {
        weights.insert(month, point_long_short(&scores, month)?);
    }
    realize(strategy_id, &weights, panel, None, cost_rate)
}

/// Monthly-rebalanced uncertainty-adjusted long-short spread.
pub fn ua_spread_series<F: Real>(
    strategy_id: &str,
    bounds: &[BoundRecord<F>],
    panel: &PanelDataset<F>,
    cost_rate: f64,
) -> Result<PortfolioSeries<F>, PortfolioError> {
    let mut weights: BTreeMap<MonthId, MonthWeights<F>> = BTreeMap::new();
    for (month, (upper, lower)) in bound_scores_by_month(bounds) {
        weights.insert(month, ua_long_short(&upper, &lower, month)?);
    }
    realize(strategy_id, &weights, panel, None, cost_rate)
}

/// Benchmark-relative long-only leg holding the top decile of `scores`.
pub fn long_only_series<F: Real>(
    strategy_id: &str,
    scores_by_month: &BTreeMap<MonthId, BTreeMap<AssetId, F>>,
    score_kind: ScoreKind,
    panel: &PanelDataset<F>,
    benchmark: &BTreeMap<MonthId, F>,
    cost_rate: f64,
) -> Result<PortfolioSeries<F>, PortfolioError> {
    let mut weights: BTreeMap<MonthId, MonthWeights<F>> = BTreeMap::new();
    for (&month, scores) in scores_by_month {
        weights.insert(month, build_long_only(scores, month, score_kind)?);
    }
    realize(strategy_id, &weights, panel, Some(benchmark), cost_rate)
}
