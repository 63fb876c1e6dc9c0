//! Effective configuration: the JSON config file (or defaults) with
//! command-line flags applied on top. Flags win.

use uasort_core::pipeline::{PipelineError, RunConfig};

use crate::CommonFlags;

pub fn effective_config(flags: &CommonFlags) -> Result<RunConfig, PipelineError> {
    let mut config = match &flags.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &flags.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = flags.seed {
        config.seed = seed;
        if let Some(synth) = &mut config.synth {
            synth.seed = seed;
        }
    }
    if let Some(alphas) = &flags.alpha {
        config.alphas = alphas.clone();
    }
    if let Some(method) = &flags.method {
        config.methods = match method.as_str() {
            "both" => vec!["empirical".into(), "normal".into()],
            other => vec![other.to_string()],
        };
    }
    if let Some(bps) = flags.cost_bps {
        config.cost_rate = f64::from(bps) / 10_000.0;
    }
    if let Some(lags) = flags.nw_lags {
        config.nw_lags = Some(lags);
    }
    Ok(config)
}
