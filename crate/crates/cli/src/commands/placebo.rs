//! `uasort placebo`: permutation table over the stored backtest artifacts.

use std::io::Write as _;

use uasort_core::calibration::HalfWidthMethod;
use uasort_core::experiments::{placebo_suite, PlaceboInputs};
use uasort_core::pipeline::{read_bounds, read_predictions, write_manifest, PipelineError, RunConfig};

pub fn run(config: &RunConfig) -> Result<(), PipelineError> {
    config.validate(true)?;
    let panel = super::load_input_panel(config)?;
    let predictions = read_predictions::<f64>(&config.out_dir.join("predictions.csv"))?;
    let bounds = read_bounds::<f64>(&config.out_dir.join("bounds.csv"))?;

    let mut buf = Vec::new();
    writeln!(
        buf,
        "model,alpha,n_seeds,sharpe_none,sharpe_time,d_none_time,sharpe_stock,d_time_stock,sharpe_all,d_stock_all,sharpe_point,d_all_point,sd_time,sd_stock,sd_all"
    )
    .unwrap();

    for (model, preds) in &predictions {
        // empirical at 0.05 when present, otherwise the first stored set
        let preferred = (model.clone(), HalfWidthMethod::Empirical, "0.05".to_string());
        let key = if bounds.contains_key(&preferred) {
            preferred
        } else {
            bounds
                .keys()
                .find(|(m, _, _)| m == model)
                .cloned()
                .ok_or_else(|| PipelineError::Validation {
                    message: format!("no stored bounds for model {model:?}"),
                })?
        };
        let inputs = PlaceboInputs {
            model,
            predictions: preds,
            bounds: &bounds[&key],
            panel: &panel,
            cost_rate: config.cost_rate,
            year_block: config.year_block_time_shuffle,
        };
        let row = placebo_suite(&inputs, &config.seeds)
            .map_err(|e| PipelineError::stage("placebo_suite", e))?;
        writeln!(
            buf,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.model,
            row.alpha,
            row.n_seeds,
            row.sharpe_none,
            row.sharpe_time,
            row.d_none_time,
            row.sharpe_stock,
            row.d_time_stock,
            row.sharpe_all,
            row.d_stock_all,
            row.sharpe_point,
            row.d_all_point,
            row.sharpe_time_sd,
            row.sharpe_stock_sd,
            row.sharpe_all_sd
        )
        .unwrap();
    }

    super::write_text(
        &config.out_dir.join("placebo.csv"),
        std::str::from_utf8(&buf).expect("utf8"),
    )?;
    write_manifest("placebo", config, &config.out_dir)?;
    println!("placebo table -> {}", config.out_dir.join("placebo.csv").display());
    Ok(())
}
