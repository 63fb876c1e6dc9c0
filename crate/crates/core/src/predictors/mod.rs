//! Built-in regularized linear predictors, hyperparameter grid search, the
//! rolling train/validation/test scheduler, and ingestion of externally
//! produced point predictions.

mod design;
mod enet;
mod external;
mod grid;
mod pcr;
mod pls;
mod schedule;

use std::collections::BTreeMap;

use thiserror::Error;

pub use design::{assemble_design, assemble_design_multi, design_width, predict_month};
pub use enet::{enet_objective, fit_enet, fit_enet_traced, EnetParams};
pub use external::load_external_predictions;
pub use grid::{default_grid, fit_with_hyperparams, grid_search, GridSpec};
pub use pcr::fit_pcr;
pub use pls::fit_pls;
pub use schedule::{rolling_schedule, RollingSplit};

use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

/// Identifier of a prediction model (a built-in method name or an external tag).
pub type ModelId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Enet,
    Pcr,
    Pls,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Enet => "enet",
            Method::Pcr => "pcr",
            Method::Pls => "pls",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "enet" => Some(Method::Enet),
            "pcr" => Some(Method::Pcr),
            "pls" => Some(Method::Pls),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Warnings surfaced on a fitted model instead of failing the fit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelWarning {
    /// Coordinate descent hit the sweep cap before reaching tolerance.
    NotConverged { sweeps: usize },
    /// PLS ran out of covariance directions before the requested k.
    EarlyStop { achieved: usize, requested: usize },
}

/// A fitted linear prediction rule over the design columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<F> {
    pub intercept: F,
    pub weights: Vec<F>,
    pub method: Method,
    pub hyperparams: BTreeMap<String, f64>,
    pub warning: Option<ModelWarning>,
}

impl<F: Real> LinearModel<F> {
    /// Point prediction for one design row. On the zero vector this returns
    /// the intercept exactly.
    pub fn predict(&self, x: &[F]) -> F {
        debug_assert_eq!(x.len(), self.weights.len());
        let mut acc = self.intercept;
        for (&w, &v) in self.weights.iter().zip(x) {
            acc += w * v;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSource {
    Builtin,
    External,
}

impl std::fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PredictionSource::Builtin => "builtin",
            PredictionSource::External => "external",
        })
    }
}

/// One point prediction for an (asset, month, model) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord<F> {
    pub asset: AssetId,
    pub month: MonthId,
    pub model: ModelId,
    pub mu_hat: F,
    pub source: PredictionSource,
}

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("need at least 2 training rows, got {n}")]
    TooFewRows { n: usize },
    #[error("design column {col} contains a non-finite value")]
    NonFiniteColumn { col: usize },
    #[error("k = {k} exceeds the numeric rank {rank} of the centered design")]
    KExceedsRank { k: usize, rank: usize },
    #[error("k must be >= 1")]
    ZeroComponents,
    #[error("insufficient panel span: need {required_years} whole years, have {available_years}")]
    InsufficientSpan { required_years: usize, available_years: usize },
    #[error("hyperparameter grid for {name} is empty or missing")]
    EmptyGridAxis { name: String },
    #[error("grid point {point} failed: {source}")]
    GridPointFailed {
        point: String,
        #[source]
        source: Box<PredictorError>,
    },
    #[error("duplicate external prediction for ({asset}, {month})")]
    DuplicatePrediction { asset: AssetId, month: MonthId },
    #[error("row {row}: cannot parse {column}={value:?}")]
    ParseRow { row: usize, column: String, value: String },
    #[error("missing column: {column}")]
    MissingColumn { column: String },
    #[error("no training observations in the requested month range")]
    EmptyDesign,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
