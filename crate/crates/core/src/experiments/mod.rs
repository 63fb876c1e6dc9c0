//! Identification and mechanism studies: ranking-improvement panels,
//! fixed-effects driver regressions, seeded placebo shuffles of the
//! half-widths, and the empirical-vs-normal bound comparison.

mod fe;
mod normal_cmp;
mod placebo;
mod ranking;
mod shuffle;

use thiserror::Error;

pub use fe::{fe_regression, FeTerm, FERegressionResult};
pub use normal_cmp::{normal_vs_empirical, NormalVsEmpiricalRow};
pub use placebo::{placebo_suite, PlaceboInputs, PlaceboRow};
pub use ranking::{ranking_improvements, RankImprovementPanel, RankImprovementRow};
pub use shuffle::{shuffle_halfwidths, ShuffleMode, ShuffleSpec};

use crate::panel::AssetId;

#[derive(Debug, Error)]
pub enum ExperimentsError {
    #[error("score universes differ: only in first = {only_left:?}, only in second = {only_right:?}")]
    UniverseMismatch { only_left: Vec<AssetId>, only_right: Vec<AssetId> },
    #[error("collinear regressors after the within transform: {terms:?}")]
    CollinearTerms { terms: Vec<String> },
    #[error("fixed-effects regression needs more observations than parameters: n = {n}, k = {k}")]
    TooFewObservations { n: usize, k: usize },
    #[error("term count mismatch: {context}")]
    TermMismatch { context: String },
    #[error("placebo suite needs at least one seed")]
    NoSeeds,
    #[error(transparent)]
    Portfolio(#[from] crate::portfolio::PortfolioError),
    #[error(transparent)]
    Evaluation(#[from] crate::evaluation::EvaluationError),
}
