//! Rolling backtest orchestration: per-split grid search, final fits,
//! residual cross-fitting, bound construction, and strategy realization.

use std::collections::BTreeMap;

use crate::calibration::{
    build_bounds, cross_fit_residuals, BoundCoverage, BoundRecord, HalfWidthMethod, ResidualPool,
};
use crate::evaluation::{build_report, FactorTable, PerformanceReport};
use crate::panel::{AssetId, MonthId, PanelDataset};
use crate::portfolio::{
    long_only_series, point_scores_by_month, point_spread_series, ua_spread_series,
    PortfolioSeries, ScoreKind,
};
use crate::predictors::{
    assemble_design, default_grid, design_width, fit_with_hyperparams, grid_search,
    load_external_predictions, predict_month, rolling_schedule, GridSpec, Method,
    PredictionRecord, PredictionSource, RollingSplit,
};
use crate::scalar::Real;

use super::{PipelineError, RunConfig};

/// What to run for one model id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Builtin(Method),
    External { model_id: String, path: std::path::PathBuf },
}

impl ModelSpec {
    pub fn model_id(&self) -> String {
        match self {
            ModelSpec::Builtin(m) => m.name().to_string(),
            ModelSpec::External { model_id, .. } => model_id.clone(),
        }
    }

    pub fn from_config(config: &RunConfig) -> Result<Vec<ModelSpec>, PipelineError> {
        let mut specs = Vec::new();
        for m in &config.models {
            let method = Method::parse(m).ok_or_else(|| PipelineError::Validation {
                message: format!("unknown builtin model {m:?}"),
            })?;
            specs.push(ModelSpec::Builtin(method));
        }
        for ext in &config.external_predictions {
            specs.push(ModelSpec::External {
                model_id: ext.model_id.clone(),
                path: ext.path.clone(),
            });
        }
        Ok(specs)
    }
}

/// Identifies one realized strategy in reports and series files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StrategyKey {
    pub model: String,
    /// "point" or "ua".
    pub mode: String,
    /// Half-width method for ua strategies.
    pub method: Option<HalfWidthMethod>,
    /// Alpha formatted with shortest round-trip for ua strategies.
    pub alpha: Option<String>,
    pub long_only: bool,
}

impl StrategyKey {
    pub fn point(model: &str, long_only: bool) -> Self {
        Self { model: model.to_string(), mode: "point".into(), method: None, alpha: None, long_only }
    }

    pub fn ua(model: &str, method: HalfWidthMethod, alpha: f64, long_only: bool) -> Self {
        Self {
            model: model.to_string(),
            mode: "ua".into(),
            method: Some(method),
            alpha: Some(format!("{alpha}")),
            long_only,
        }
    }

    /// Flat id used in delimited outputs, e.g. `enet_ua_empirical_a0.05_ls`.
    pub fn id(&self) -> String {
        let leg = if self.long_only { "lo" } else { "ls" };
        match (&self.method, &self.alpha) {
            (Some(m), Some(a)) => format!("{}_{}_{}_a{}_{}", self.model, self.mode, m, a, leg),
            _ => format!("{}_{}_{}", self.model, self.mode, leg),
        }
    }
}

/// Everything the studies need about one model's backtest.
#[derive(Debug, Clone)]
pub struct ModelArtifacts<F> {
    pub model_id: String,
    pub splits: Vec<RollingSplit>,
    pub predictions: Vec<PredictionRecord<F>>,
    /// Per split id: selected hyperparameters (builtin models only).
    pub hyperparams: BTreeMap<String, BTreeMap<String, f64>>,
    /// Per split id: per-asset residual pools.
    pub pools: BTreeMap<String, BTreeMap<AssetId, ResidualPool<F>>>,
    /// Per (method, alpha string): bound records over all test months.
    pub bounds: BTreeMap<(HalfWidthMethod, String), Vec<BoundRecord<F>>>,
    /// Per (method, alpha string): merged coverage report.
    pub coverage: BTreeMap<(HalfWidthMethod, String), BoundCoverage>,
}

/// One realized strategy with its performance row.
#[derive(Debug, Clone)]
pub struct StrategyResult<F> {
    pub key: StrategyKey,
    pub series: PortfolioSeries<F>,
    pub report: PerformanceReport<F>,
}

#[derive(Debug, Clone)]
pub struct BacktestOutput<F> {
    pub artifacts: Vec<ModelArtifacts<F>>,
    pub strategies: Vec<StrategyResult<F>>,
}

fn grid_for(config: &RunConfig, method: Method, width: usize) -> GridSpec {
    match config.grids.get(method.name()) {
        Some(axes) => GridSpec::new(
            axes.iter().map(|(name, values)| (name.clone(), values.clone())).collect(),
        ),
        None => default_grid(method, width),
    }
}

/// Train, predict, and cross-fit one model over every rolling split.
pub fn compute_model_artifacts<F: Real>(
    spec: &ModelSpec,
    panel: &PanelDataset<F>,
    config: &RunConfig,
) -> Result<ModelArtifacts<F>, PipelineError> {
    let splits = rolling_schedule(panel.month_index(), config.train_years, config.val_years)
        .map_err(|e| PipelineError::stage("rolling_schedule", e))?;
    let include_macro = config.include_macro_in_design;
    let model_id = spec.model_id();

    let mut predictions: Vec<PredictionRecord<F>> = Vec::new();
    let mut hyperparams = BTreeMap::new();
    let mut pools = BTreeMap::new();

    match spec {
        ModelSpec::Builtin(method) => {
            let width = design_width(panel, include_macro);
            let grid = grid_for(config, *method, width);
            for split in &splits {
                let (hp, _mse) = grid_search(*method, split, panel, &grid, include_macro)
                    .map_err(|e| PipelineError::stage("grid_search", e))?;
                let (x_train, y_train, _) =
                    assemble_design(panel, split.train.0, split.train.1, include_macro)
                        .map_err(|e| PipelineError::stage("assemble_design", e))?;
                let model = fit_with_hyperparams(*method, &x_train, &y_train, &hp)
                    .map_err(|e| PipelineError::stage("final_fit", e))?;
                for month in split.test_months() {
                    for (asset, mu_hat) in predict_month(panel, &model, month, include_macro) {
                        predictions.push(PredictionRecord {
                            asset,
                            month,
                            model: model_id.clone(),
                            mu_hat,
                            source: PredictionSource::Builtin,
                        });
                    }
                }
                let split_pools = cross_fit_residuals(
                    *method,
                    &hp,
                    split,
                    config.k_folds,
                    panel,
                    include_macro,
                )
                .map_err(|e| PipelineError::stage("cross_fit_residuals", e))?;
                hyperparams.insert(split.id.clone(), hp);
                pools.insert(split.id.clone(), split_pools);
            }
        }
        ModelSpec::External { model_id: ext_id, path } => {
            let records = load_external_predictions::<F>(path, ext_id)
                .map_err(|e| PipelineError::stage("load_external_predictions", e))?;
            let by_key: BTreeMap<(MonthId, AssetId), F> =
                records.iter().map(|r| ((r.month, r.asset.clone()), r.mu_hat)).collect();
            for split in &splits {
                // Pools from the provided out-of-sample predictions over the
                // train+validation window: residual = realized - mu_hat.
                let mut split_pools: BTreeMap<AssetId, ResidualPool<F>> = BTreeMap::new();
                let (w_start, w_end) = split.window();
                for month in w_start.range_to(w_end) {
                    for obs in panel.month_slice(month) {
                        if let Some(&mu) = by_key.get(&(month, obs.asset.clone())) {
                            let signed = obs.next_excess_return - mu;
                            split_pools
                                .entry(obs.asset.clone())
                                .or_insert_with(|| {
                                    ResidualPool::new(obs.asset.clone(), split.id.clone())
                                })
                                .entries
                                .push(crate::calibration::ResidualEntry {
                                    abs: signed.abs(),
                                    signed,
                                    fold: 0,
                                    month,
                                });
                        }
                    }
                }
                for month in split.test_months() {
                    for obs in panel.month_slice(month) {
                        if let Some(&mu) = by_key.get(&(month, obs.asset.clone())) {
                            predictions.push(PredictionRecord {
                                asset: obs.asset.clone(),
                                month,
                                model: ext_id.clone(),
                                mu_hat: mu,
                                source: PredictionSource::External,
                            });
                        }
                    }
                }
                pools.insert(split.id.clone(), split_pools);
            }
        }
    }

    // Bounds per (method, alpha) per split, concatenated over splits.
    let methods = config.parsed_methods()?;
    let mut bounds = BTreeMap::new();
    let mut coverage = BTreeMap::new();
    for &method in &methods {
        for &alpha in &config.alphas {
            let mut all_bounds = Vec::new();
            let mut merged = BoundCoverage::default();
            for split in &splits {
                let split_predictions: Vec<PredictionRecord<F>> = predictions
                    .iter()
                    .filter(|p| p.month >= split.test.0 && p.month <= split.test.1)
                    .cloned()
                    .collect();
                if split_predictions.is_empty() {
                    continue;
                }
                let (mut records, cov) = build_bounds(
                    &split_predictions,
                    &pools[&split.id],
                    split,
                    alpha,
                    method,
                    config.n_min,
                )
                .map_err(|e| PipelineError::stage("build_bounds", e))?;
                all_bounds.append(&mut records);
                merged.n_bounds += cov.n_bounds;
                merged.n_fallback += cov.n_fallback;
                merged.excluded.extend(cov.excluded);
            }
            let key = (method, format!("{alpha}"));
            bounds.insert(key.clone(), all_bounds);
            coverage.insert(key, merged);
        }
    }

    Ok(ModelArtifacts {
        model_id,
        splits,
        predictions,
        hyperparams,
        pools,
        bounds,
        coverage,
    })
}

/// Realize every configured strategy for one model's artifacts.
pub fn strategies_for_model<F: Real>(
    artifacts: &ModelArtifacts<F>,
    panel: &PanelDataset<F>,
    config: &RunConfig,
    factors: Option<&FactorTable<F>>,
    benchmark: Option<&BTreeMap<MonthId, F>>,
) -> Result<Vec<StrategyResult<F>>, PipelineError> {
    let mut out = Vec::new();
    let model = &artifacts.model_id;

    let mut push = |key: StrategyKey, series: PortfolioSeries<F>| -> Result<(), PipelineError> {
        let report = build_report(
            &key.id(),
            &series.months,
            &series.net_returns,
            factors,
            config.nw_lags,
            !key.long_only,
        )
        .map_err(|e| PipelineError::stage("build_report", e))?;
        out.push(StrategyResult { key, series, report });
        Ok(())
    };

    // Point benchmark.
    let point_series =
        point_spread_series(&StrategyKey::point(model, false).id(), &artifacts.predictions, panel, config.cost_rate)
            .map_err(|e| PipelineError::stage("point_long_short", e))?;
    push(StrategyKey::point(model, false), point_series)?;

    if let Some(bench) = benchmark {
        let scores = point_scores_by_month(&artifacts.predictions);
        let series = long_only_series(
            &StrategyKey::point(model, true).id(),
            &scores,
            ScoreKind::Point,
            panel,
            bench,
            config.cost_rate,
        )
        .map_err(|e| PipelineError::stage("point_long_only", e))?;
        push(StrategyKey::point(model, true), series)?;
    }

    // Uncertainty-adjusted strategies.
    for ((method, alpha_str), bounds) in &artifacts.bounds {
        let alpha: f64 = alpha_str.parse().expect("alpha strings round-trip");
        let key = StrategyKey::ua(model, *method, alpha, false);
        let series = ua_spread_series(&key.id(), bounds, panel, config.cost_rate)
            .map_err(|e| PipelineError::stage("ua_long_short", e))?;
        push(key, series)?;

        if let Some(bench) = benchmark {
            let mut upper_scores: BTreeMap<MonthId, BTreeMap<AssetId, F>> = BTreeMap::new();
            for b in bounds {
                upper_scores.entry(b.month).or_default().insert(b.asset.clone(), b.upper);
            }
            let key = StrategyKey::ua(model, *method, alpha, true);
            let series = long_only_series(
                &key.id(),
                &upper_scores,
                ScoreKind::Upper,
                panel,
                bench,
                config.cost_rate,
            )
            .map_err(|e| PipelineError::stage("ua_long_only", e))?;
            push(key, series)?;
        }
    }

    Ok(out)
}

/// The full backtest: artifacts and realized strategies for every model.
pub fn run_backtest<F: Real>(
    panel: &PanelDataset<F>,
    config: &RunConfig,
    factors: Option<&FactorTable<F>>,
    benchmark: Option<&BTreeMap<MonthId, F>>,
) -> Result<BacktestOutput<F>, PipelineError> {
    let specs = ModelSpec::from_config(config)?;
    let mut artifacts = Vec::new();
    let mut strategies = Vec::new();
    for spec in &specs {
        let model_artifacts = compute_model_artifacts(spec, panel, config)?;
        strategies.extend(strategies_for_model(
            &model_artifacts,
            panel,
            config,
            factors,
            benchmark,
        )?);
        artifacts.push(model_artifacts);
    }
    Ok(BacktestOutput { artifacts, strategies })
}
