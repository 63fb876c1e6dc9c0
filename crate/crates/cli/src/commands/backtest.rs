//! `uasort backtest`: the full train / calibrate / sort / evaluate loop.

use std::io::Write as _;

use uasort_core::pipeline::{
    normal_vs_empirical_study, run_backtest, write_backtest_artifacts, write_manifest,
    PipelineError, RunConfig,
};

pub fn run(config: &RunConfig) -> Result<(), PipelineError> {
    config.validate(true)?;
    let panel = super::load_input_panel(config)?;
    let factors = super::load_factors(config)?;
    let benchmark = super::load_benchmark(config)?;

    let output = run_backtest(&panel, config, factors.as_ref(), benchmark.as_ref())?;
    write_backtest_artifacts(&output, config, &config.out_dir)?;

    // Empirical-vs-normal comparison table (both methods rebuilt from pools).
    let table = normal_vs_empirical_study(&output.artifacts, &panel, config)?;
    let mut buf = Vec::new();
    writeln!(
        buf,
        "model,alpha,sharpe_point,sharpe_empirical,sharpe_normal,median_halfwidth_empirical,median_halfwidth_normal"
    )
    .unwrap();
    for row in &table {
        writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            row.model,
            row.alpha,
            row.sharpe_point,
            row.sharpe_empirical,
            row.sharpe_normal,
            row.median_halfwidth_empirical,
            row.median_halfwidth_normal
        )
        .unwrap();
    }
    super::write_text(
        &config.out_dir.join("normal_vs_empirical.csv"),
        std::str::from_utf8(&buf).expect("utf8"),
    )?;

    write_manifest("backtest", config, &config.out_dir)?;
    println!(
        "backtest complete: {} models, {} strategies -> {}",
        output.artifacts.len(),
        output.strategies.len(),
        config.out_dir.display()
    );
    Ok(())
}
