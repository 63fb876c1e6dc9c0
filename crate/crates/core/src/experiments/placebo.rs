//! Placebo permutation suite for one model's uncertainty-adjusted strategy.
//!
//! For each shuffle mode the bounds are permuted, the long-short spread is
//! rebuilt and realized, and the annualized Sharpe ratio recorded. Shuffled
//! modes are averaged over the provided seeds with their per-seed dispersion;
//! mode `none` and the point-prediction benchmark are deterministic. The
//! whole suite is a pure function of its inputs and seeds.

use crate::calibration::BoundRecord;
use crate::evaluation::sharpe;
use crate::panel::PanelDataset;
use crate::portfolio::{point_spread_series, ua_spread_series};
use crate::predictors::PredictionRecord;
use crate::scalar::{mean, sample_sd, Real};

use super::{shuffle_halfwidths, ExperimentsError, ShuffleMode, ShuffleSpec};

pub struct PlaceboInputs<'a, F> {
    pub model: &'a str,
    pub predictions: &'a [PredictionRecord<F>],
    pub bounds: &'a [BoundRecord<F>],
    pub panel: &'a PanelDataset<F>,
    pub cost_rate: f64,
    /// Time-mode granularity: permute whole 12-month blocks when true.
    pub year_block: bool,
}

/// One model row of the placebo table: Sharpe under each alignment regime,
/// per-seed dispersion for the shuffled regimes, and the four adjacent
/// differences.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaceboRow<F> {
    pub model: String,
    pub alpha: f64,
    pub n_seeds: usize,
    pub sharpe_none: F,
    pub sharpe_time: F,
    pub sharpe_time_sd: F,
    pub sharpe_stock: F,
    pub sharpe_stock_sd: F,
    pub sharpe_all: F,
    pub sharpe_all_sd: F,
    pub sharpe_point: F,
    /// No Shuffle minus Time Shuffle.
    pub d_none_time: F,
    /// Time Shuffle minus Stock Shuffle.
    pub d_time_stock: F,
    /// Stock Shuffle minus All Shuffle.
    pub d_stock_all: F,
    /// All Shuffle minus Point Prediction.
    pub d_all_point: F,
}

/// Derive the permutation seed for one (suite seed, model, mode) task so
/// fan-out order cannot matter. FNV-1a over the tuple's bytes.
pub(crate) fn substream_seed(seed: u64, model: &str, mode: ShuffleMode) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&seed.to_le_bytes());
    eat(model.as_bytes());
    eat(mode.name().as_bytes());
    hash
}

fn ua_sharpe<F: Real>(
    inputs: &PlaceboInputs<'_, F>,
    bounds: &[BoundRecord<F>],
    label: &str,
) -> Result<F, ExperimentsError> {
    let series = ua_spread_series(label, bounds, inputs.panel, inputs.cost_rate)?;
    Ok(sharpe(&series.net_returns).unwrap_or_else(F::zero))
}

pub fn placebo_suite<F: Real>(
    inputs: &PlaceboInputs<'_, F>,
    seeds: &[u64],
) -> Result<PlaceboRow<F>, ExperimentsError> {
    if seeds.is_empty() {
        return Err(ExperimentsError::NoSeeds);
    }
    let alpha = inputs.bounds.first().map_or(0.0, |b| b.alpha);

    let sharpe_none = ua_sharpe(inputs, inputs.bounds, "none")?;

    let point_series = point_spread_series(
        &format!("{}_point", inputs.model),
        inputs.predictions,
        inputs.panel,
        inputs.cost_rate,
    )?;
    let sharpe_point = sharpe(&point_series.net_returns).unwrap_or_else(F::zero);

    let per_mode = |mode: ShuffleMode| -> Result<(F, F), ExperimentsError> {
        let mut values = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let spec = ShuffleSpec {
                mode,
                seed: substream_seed(seed, inputs.model, mode),
                year_block: inputs.year_block,
            };
            let shuffled = shuffle_halfwidths(inputs.bounds, &spec);
            values.push(ua_sharpe(inputs, &shuffled, mode.name())?);
        }
        Ok((mean(&values), sample_sd(&values)))
    };

    let (sharpe_time, sharpe_time_sd) = per_mode(ShuffleMode::Time)?;
    let (sharpe_stock, sharpe_stock_sd) = per_mode(ShuffleMode::Stock)?;
    let (sharpe_all, sharpe_all_sd) = per_mode(ShuffleMode::All)?;

    Ok(PlaceboRow {
        model: inputs.model.to_string(),
        alpha,
        n_seeds: seeds.len(),
        sharpe_none,
        sharpe_time,
        sharpe_time_sd,
        sharpe_stock,
        sharpe_stock_sd,
        sharpe_all,
        sharpe_all_sd,
        sharpe_point,
        d_none_time: sharpe_none - sharpe_time,
        d_time_stock: sharpe_time - sharpe_stock,
        d_stock_all: sharpe_stock - sharpe_all,
        d_all_point: sharpe_all - sharpe_point,
    })
}
