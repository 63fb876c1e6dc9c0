//! Residual calibration: time-ordered K-fold cross-fitting inside each
//! rolling window, per-asset pools of out-of-fold residuals, and the
//! empirical-quantile or normal-approximation half-widths that turn point
//! predictions into uncertainty-adjusted scores.

mod bounds;
mod crossfit;
mod folds;
mod halfwidth;

use thiserror::Error;

pub use bounds::{build_bounds, BoundCoverage};
pub use crossfit::cross_fit_residuals;
pub use folds::{make_time_folds, FoldScheme};
pub use halfwidth::{
    empirical_halfwidth, inverse_normal_cdf, normal_halfwidth, order_statistic_index,
    DEFAULT_MIN_POOL,
};

use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("need at least 3 folds, got {k}")]
    TooFewFolds { k: usize },
    #[error("window of {window_len} months cannot host {k} folds")]
    WindowTooShort { k: usize, window_len: usize },
    #[error("alpha must lie in (0, 1), got {alpha}")]
    AlphaOutOfRange { alpha: f64 },
    #[error("residual pool for {asset} has {n} residuals, below the minimum {n_min}")]
    PoolTooSmall { asset: AssetId, n: usize, n_min: usize },
    #[error("prediction for ({asset}, {month}) lies outside the split's test year")]
    PredictionOutsideTest { asset: AssetId, month: MonthId },
    #[error("window {window_id} produced no calibration residuals at all")]
    EmptyWindow { window_id: String },
    #[error(transparent)]
    Predictor(#[from] crate::predictors::PredictorError),
}

/// One out-of-fold calibration residual with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualEntry<F> {
    /// |r - f_hat(x)|.
    pub abs: F,
    /// r - f_hat(x), kept for the normal-approximation half-width.
    pub signed: F,
    /// 1-based calibration fold that produced this residual.
    pub fold: usize,
    /// Month of the calibrated observation.
    pub month: MonthId,
}

/// Per-asset multiset of out-of-fold absolute residuals for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPool<F> {
    pub asset: AssetId,
    pub window_id: String,
    pub entries: Vec<ResidualEntry<F>>,
}

impl<F: Real> ResidualPool<F> {
    pub fn new(asset: AssetId, window_id: String) -> Self {
        Self { asset, window_id, entries: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn abs_residuals(&self) -> Vec<F> {
        self.entries.iter().map(|e| e.abs).collect()
    }

    pub fn signed_residuals(&self) -> Vec<F> {
        self.entries.iter().map(|e| e.signed).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HalfWidthMethod {
    Empirical,
    Normal,
}

impl HalfWidthMethod {
    pub fn name(self) -> &'static str {
        match self {
            HalfWidthMethod::Empirical => "empirical",
            HalfWidthMethod::Normal => "normal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "empirical" => Some(HalfWidthMethod::Empirical),
            "normal" => Some(HalfWidthMethod::Normal),
            _ => None,
        }
    }
}

impl std::fmt::Display for HalfWidthMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Symmetric uncertainty-adjusted bound around one point prediction.
///
/// `upper` and `lower` are stored exactly as `mu_hat + half_width` and
/// `mu_hat - half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord<F> {
    pub asset: AssetId,
    pub month: MonthId,
    pub model: String,
    pub alpha: f64,
    pub mu_hat: F,
    pub half_width: F,
    pub upper: F,
    pub lower: F,
    pub method: HalfWidthMethod,
    /// True when the asset's own pool failed the size floor and the
    /// cross-sectional pooled half-width was used instead.
    pub fallback: bool,
}

impl<F: Real> BoundRecord<F> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        asset: AssetId,
        month: MonthId,
        model: String,
        alpha: f64,
        mu_hat: F,
        half_width: F,
        method: HalfWidthMethod,
        fallback: bool,
    ) -> Self {
        Self {
            asset,
            month,
            model,
            alpha,
            mu_hat,
            half_width,
            upper: mu_hat + half_width,
            lower: mu_hat - half_width,
            method,
            fallback,
        }
    }

    /// Re-derive `upper`/`lower` after replacing the half-width (used by the
    /// placebo shuffles, which never move `mu_hat`).
    pub fn with_half_width(&self, half_width: F) -> Self {
        Self::new(
            self.asset.clone(),
            self.month,
            self.model.clone(),
            self.alpha,
            self.mu_hat,
            half_width,
            self.method,
            self.fallback,
        )
    }
}
