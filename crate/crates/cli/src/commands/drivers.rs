//! `uasort drivers`: fixed-effects regressions of ranking improvements on
//! firm characteristics, macro state, and their interactions.

use std::io::Write as _;

use uasort_core::calibration::HalfWidthMethod;
use uasort_core::pipeline::{drivers_for_bounds, read_bounds, write_manifest, PipelineError, RunConfig};

pub fn run(config: &RunConfig) -> Result<(), PipelineError> {
    config.validate(true)?;
    let panel = super::load_input_panel(config)?;
    let bounds = read_bounds::<f64>(&config.out_dir.join("bounds.csv"))?;

    let mut models: Vec<String> = bounds.keys().map(|(m, _, _)| m.clone()).collect();
    models.dedup();

    for model in &models {
        let preferred = (model.clone(), HalfWidthMethod::Empirical, "0.05".to_string());
        let key = if bounds.contains_key(&preferred) {
            preferred
        } else {
            bounds.keys().find(|(m, _, _)| m == model).cloned().expect("model key exists")
        };
        let result = drivers_for_bounds(model, &bounds[&key], &panel, config)?;

        let mut buf = Vec::new();
        writeln!(buf, "term,coef_upper,z_upper,coef_lower,z_lower,n_obs,n_firms").unwrap();
        for row in &result.rows {
            writeln!(
                buf,
                "{},{},{},{},{},{},{}",
                row.term,
                row.coef_upper,
                row.z_upper,
                row.coef_lower,
                row.z_lower,
                result.n_obs,
                result.n_firms
            )
            .unwrap();
        }
        super::write_text(
            &config.out_dir.join(format!("drivers_{model}.csv")),
            std::str::from_utf8(&buf).expect("utf8"),
        )?;
        println!("drivers table for {model} ({} terms)", result.rows.len());
    }
    write_manifest("drivers", config, &config.out_dir)?;
    Ok(())
}
