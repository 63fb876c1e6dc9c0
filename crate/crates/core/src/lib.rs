//! Uncertainty-adjusted portfolio sorting.
//!
//! This crate turns machine-learning return predictions into decile
//! portfolios whose long leg is ranked by optimistic prediction bounds and
//! whose short leg is ranked by pessimistic bounds, instead of by the point
//! predictions alone. The bounds come from asset-specific quantiles of
//! out-of-fold calibration residuals gathered under a rolling, time-ordered
//! cross-validation scheme.
//!
//! The pieces, bottom to top:
//! - [`panel`]: the long-form data model, ingestion, preprocessing, and a
//!   seeded synthetic generator used as a test oracle.
//! - [`predictors`]: Elastic Net, principal-components and partial-least-
//!   squares regressions, grid search, the rolling train/validation/test
//!   scheduler, and ingestion of externally produced predictions.
//! - [`calibration`]: time-ordered K-fold cross-fitting, per-asset residual
//!   pools, and empirical-quantile or normal-approximation half-widths.
//! - [`portfolio`]: decile assignment, long-short and long-only
//!   construction, turnover, transaction costs, and net-value paths.
//! - [`evaluation`]: annualized statistics, Newey-West t-statistics, and
//!   factor alphas.
//! - [`experiments`]: ranking-improvement panels, fixed-effects driver
//!   regressions, placebo half-width shuffles, and the empirical-vs-normal
//!   bound comparison.
//! - [`pipeline`]: the batch backtest orchestration used by the CLI.
//!
//! All numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below pin the `f64` instantiation that the CLI and most tests use.

pub mod calibration;
pub mod evaluation;
pub mod experiments;
pub mod linalg;
pub mod panel;
pub mod pipeline;
pub mod portfolio;
pub mod predictors;
pub mod scalar;

pub use panel::{AssetId, MonthId};
pub use scalar::Real;

/// Default `f64` instantiations of the core types.
pub type Panel = panel::PanelDataset<f64>;
pub type Observation = panel::PanelObservation<f64>;
pub type GroundTruth = panel::SyntheticGroundTruth;
