//! `uasort synth`: write a synthetic panel and its ground-truth sidecar.

use uasort_core::panel::{generate_synthetic, write_panel, SyntheticConfig};
use uasort_core::pipeline::{write_manifest, PipelineError, RunConfig};

pub fn run(config: &RunConfig) -> Result<(), PipelineError> {
    let synth: SyntheticConfig = config.synth.clone().unwrap_or_else(|| SyntheticConfig {
        seed: config.seed,
        ..SyntheticConfig::default()
    });
    let (panel, truth) = generate_synthetic::<f64>(&synth)
        .map_err(|e| PipelineError::Validation { message: e.to_string() })?;

    std::fs::create_dir_all(&config.out_dir).map_err(|source| PipelineError::Io {
        path: config.out_dir.display().to_string(),
        source,
    })?;
    let panel_path = config.out_dir.join("panel.csv");
    write_panel(&panel, &panel_path).map_err(|e| PipelineError::stage("write_panel", e))?;

    let truth_json = serde_json::to_string_pretty(&truth).expect("ground truth serializes");
    super::write_text(&config.out_dir.join("ground_truth.json"), &truth_json)?;
    write_manifest("synth", config, &config.out_dir)?;

    println!(
        "wrote {} ({} assets x {} months), seed {}",
        panel_path.display(),
        panel.asset_index().len(),
        panel.n_months(),
        synth.seed
    );
    Ok(())
}
