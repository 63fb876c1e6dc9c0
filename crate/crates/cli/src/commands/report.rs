//! `uasort report`: plot-ready scaled net-value pairs. For each model the
//! point-prediction path is the benchmark and the uncertainty-adjusted path
//! is rescaled so the terminal values match.

use std::io::Write as _;

use uasort_core::pipeline::{read_nav_series, scaled_nav_pairs, write_manifest, PipelineError, RunConfig};

pub fn run(config: &RunConfig) -> Result<(), PipelineError> {
    let nav = read_nav_series(&config.out_dir.join("series.csv"))?;
    let mut models: Vec<String> = nav
        .keys()
        .filter_map(|k| k.strip_suffix("_point_ls").map(str::to_string))
        .collect();
    models.sort();
    models.dedup();
    if models.is_empty() {
        return Err(PipelineError::Validation {
            message: "series.csv holds no point long-short strategies".into(),
        });
    }

    let pairs = scaled_nav_pairs(&nav, &models)?;
    for pair in &pairs {
        let mut buf = Vec::new();
        writeln!(buf, "month,strategy,nav").unwrap();
        for (i, month) in pair.months.iter().enumerate() {
            writeln!(buf, "{},{}_point_ls,{}", month, pair.model, pair.point_nav[i]).unwrap();
        }
        for (i, month) in pair.months.iter().enumerate() {
            writeln!(buf, "{},{}_scaled,{}", month, pair.ua_strategy, pair.ua_nav_scaled[i]).unwrap();
        }
        super::write_text(
            &config.out_dir.join(format!("nav_scaled_{}.csv", pair.model)),
            std::str::from_utf8(&buf).expect("utf8"),
        )?;
        println!("scaled nav pair for {} -> nav_scaled_{}.csv", pair.model, pair.model);
    }
    write_manifest("report", config, &config.out_dir)?;
    Ok(())
}
