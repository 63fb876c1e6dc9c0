//! Batch orchestration: declarative run configuration, the rolling
//! train/calibrate/backtest loop, artifact persistence, and the placebo,
//! driver, and comparison studies built on those artifacts.

mod artifacts;
mod run;
mod studies;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use artifacts::{
    config_hash, load_return_series, read_bounds, read_nav_series, read_predictions,
    write_backtest_artifacts, write_manifest, Manifest,
};
pub use run::{
    compute_model_artifacts, run_backtest, BacktestOutput, ModelArtifacts, ModelSpec,
    StrategyKey, StrategyResult,
};
pub use studies::{
    drivers_for_bounds, drivers_study, normal_vs_empirical_study, placebo_study,
    preferred_bound_key, rank_improvement_panel, scaled_nav_pairs, DriverStudyResult,
    DriverTermRow, NormalVsEmpiricalTable, ScaledNavPair,
};

use crate::calibration::HalfWidthMethod;
use crate::panel::SyntheticConfig;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {message}")]
    Validation { message: String },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("missing prerequisite artifact: {path} (run `backtest` first)")]
    MissingArtifact { path: PathBuf },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn stage(
        stage: &'static str,
        source: impl std::error::Error + Send + Sync + 'static,
    ) -> Self {
        PipelineError::Stage { stage, source: Box::new(source) }
    }

    /// Exit code contract: validation errors are distinct from runtime errors.
    pub fn is_validation(&self) -> bool {
        matches!(self, PipelineError::Validation { .. })
    }
}

/// External prediction file and the model id it carries.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExternalModelConfig {
    pub model_id: String,
    pub path: PathBuf,
}

/// Driver-regression configuration: which firm characteristics and macro
/// columns enter, and whether their interactions do.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct DriversConfig {
    /// Feature columns used as firm characteristics X; empty = all.
    pub x_features: Vec<String>,
    /// Macro columns used as state variables Z; empty = all.
    pub z_macros: Vec<String>,
    pub interactions: bool,
}

impl Default for DriversConfig {
    fn default() -> Self {
        Self { x_features: Vec::new(), z_macros: Vec::new(), interactions: true }
    }
}

/// Declarative run configuration. Command-line flags override fields.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunConfig {
    // data paths
    pub panel: Option<PathBuf>,
    pub macro_table: Option<PathBuf>,
    pub factors: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    pub external_predictions: Vec<ExternalModelConfig>,

    // preprocessing
    /// Columns of the panel file that hold macro variables (shared per month).
    pub macro_cols: Vec<String>,
    pub apply_quantile_transform: bool,
    pub standardize_macro: bool,
    pub include_macro_in_design: bool,

    // models and window
    pub models: Vec<String>,
    pub train_years: usize,
    pub val_years: usize,
    pub k_folds: usize,

    // bounds
    pub alphas: Vec<f64>,
    pub methods: Vec<String>,
    pub n_min: usize,

    // accounting and inference
    pub cost_rate: f64,
    pub nw_lags: Option<usize>,

    // randomness
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub year_block_time_shuffle: bool,

    // studies
    pub drivers: DriversConfig,

    // grid overrides per method: axis name -> values (axes iterate in
    // alphabetical order; value order is the declared tie-break order)
    pub grids: BTreeMap<String, BTreeMap<String, Vec<f64>>>,

    // synthetic generation (cmd synth)
    pub synth: Option<SyntheticConfig>,

    // output
    pub out_dir: PathBuf,
    pub emit_weights: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            panel: None,
            macro_table: None,
            factors: None,
            benchmark: None,
            external_predictions: Vec::new(),
            macro_cols: Vec::new(),
            apply_quantile_transform: false,
            standardize_macro: false,
            include_macro_in_design: true,
            models: vec!["enet".into()],
            train_years: 10,
            val_years: 3,
            k_folds: 5,
            alphas: vec![0.05],
            methods: vec!["empirical".into()],
            n_min: 12,
            cost_rate: crate::portfolio::DEFAULT_COST_RATE,
            nw_lags: None,
            seed: 7,
            seeds: vec![1, 2, 3],
            year_block_time_shuffle: false,
            drivers: DriversConfig::default(),
            grids: BTreeMap::new(),
            synth: None,
            out_dir: PathBuf::from("out"),
            emit_weights: false,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Validation {
            message: format!("cannot parse config {}: {e}", path.display()),
        })
    }

    pub fn parsed_methods(&self) -> Result<Vec<HalfWidthMethod>, PipelineError> {
        self.methods
            .iter()
            .map(|m| {
                HalfWidthMethod::parse(m).ok_or_else(|| PipelineError::Validation {
                    message: format!("unknown half-width method {m:?} (use empirical|normal)"),
                })
            })
            .collect()
    }

    /// Check path existence, alpha and cost bounds, and enum fields.
    /// Called by every command before any work starts.
    pub fn validate(&self, require_panel: bool) -> Result<(), PipelineError> {
        let check_path = |label: &str, p: &Path| -> Result<(), PipelineError> {
            if p.exists() {
                Ok(())
            } else {
                Err(PipelineError::Validation {
                    message: format!("{label} path does not exist: {}", p.display()),
                })
            }
        };
        if require_panel {
            match &self.panel {
                None => {
                    return Err(PipelineError::Validation {
                        message: "no panel path configured".into(),
                    })
                }
                Some(p) => check_path("panel", p)?,
            }
        }
        for (label, p) in [
            ("macro_table", &self.macro_table),
            ("factors", &self.factors),
            ("benchmark", &self.benchmark),
        ] {
            if let Some(p) = p {
                check_path(label, p)?;
            }
        }
        for ext in &self.external_predictions {
            check_path("external_predictions", &ext.path)?;
        }
        // empty alphas or methods = a point-only run
        if self.alphas.iter().any(|&a| !(0.0 < a && a < 1.0)) {
            return Err(PipelineError::Validation {
                message: format!("alphas must lie in (0, 1): {:?}", self.alphas),
            });
        }
        if self.cost_rate < 0.0 {
            return Err(PipelineError::Validation {
                message: format!("cost_rate must be >= 0, got {}", self.cost_rate),
            });
        }
        if self.k_folds < 3 {
            return Err(PipelineError::Validation {
                message: format!("k_folds must be >= 3, got {}", self.k_folds),
            });
        }
        self.parsed_methods()?;
        for m in &self.models {
            if crate::predictors::Method::parse(m).is_none() {
                return Err(PipelineError::Validation {
                    message: format!("unknown builtin model {m:?} (use enet|pcr|pls)"),
                });
            }
        }
        if self.models.is_empty() && self.external_predictions.is_empty() {
            return Err(PipelineError::Validation {
                message: "configure at least one builtin model or external prediction file".into(),
            });
        }
        Ok(())
    }
}
