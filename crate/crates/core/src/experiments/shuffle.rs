//! Seeded placebo permutations of the half-widths.
//!
//! Point predictions, realized returns, and universe membership never move;
//! only the half-widths are permuted, and `upper`/`lower` are recomputed
//! from the permuted values. Each mode preserves the corresponding
//! half-width multisets exactly: per asset (time mode), per month (stock
//! mode), or globally (all mode).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calibration::BoundRecord;
use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ShuffleMode {
    None,
    /// Permute each asset's half-widths across its own months.
    Time,
    /// Permute each month's half-widths across that month's assets.
    Stock,
    /// Permute half-widths across the full (asset, month) collection.
    All,
}

impl ShuffleMode {
    pub fn name(self) -> &'static str {
        match self {
            ShuffleMode::None => "none",
            ShuffleMode::Time => "time",
            ShuffleMode::Stock => "stock",
            ShuffleMode::All => "all",
        }
    }
}

impl std::fmt::Display for ShuffleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A reproducible permutation request: identical `(mode, seed, input)`
/// always produce identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShuffleSpec {
    pub mode: ShuffleMode,
    pub seed: u64,
    /// Time mode only: permute whole 12-month blocks instead of single
    /// months (block membership keyed on `month div 12`; blocks of unequal
    /// size stay in place).
    pub year_block: bool,
}

impl ShuffleSpec {
    pub fn new(mode: ShuffleMode, seed: u64) -> Self {
        Self { mode, seed, year_block: false }
    }
}

fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Apply `spec` to the records; the output order matches the input order.
pub fn shuffle_halfwidths<F: Real>(
    bounds: &[BoundRecord<F>],
    spec: &ShuffleSpec,
) -> Vec<BoundRecord<F>> {
    if spec.mode == ShuffleMode::None {
        return bounds.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut result: Vec<BoundRecord<F>> = bounds.to_vec();

    if spec.mode == ShuffleMode::Time && spec.year_block {
        shuffle_year_blocks(bounds, &mut result, &mut rng);
        return result;
    }

    // Partition record indices into permutation groups, in a deterministic
    // group order (BTreeMap iteration).
    let groups: Vec<Vec<usize>> = match spec.mode {
        ShuffleMode::None => unreachable!(),
        ShuffleMode::Time => {
            let mut by_asset: BTreeMap<&AssetId, Vec<usize>> = BTreeMap::new();
            for (i, b) in bounds.iter().enumerate() {
                by_asset.entry(&b.asset).or_default().push(i);
            }
            by_asset.into_values().collect()
        }
        ShuffleMode::Stock => {
            let mut by_month: BTreeMap<MonthId, Vec<usize>> = BTreeMap::new();
            for (i, b) in bounds.iter().enumerate() {
                by_month.entry(b.month).or_default().push(i);
            }
            by_month.into_values().collect()
        }
        ShuffleMode::All => vec![(0..bounds.len()).collect()],
    };

    for group in groups {
        let mut widths: Vec<F> = group.iter().map(|&i| bounds[i].half_width).collect();
        fisher_yates(&mut widths, &mut rng);
        for (&i, &hw) in group.iter().zip(&widths) {
            result[i] = bounds[i].with_half_width(hw);
        }
    }
    result
}

/// Year-block time shuffle: for each asset, whole 12-month blocks of
/// half-widths are reassigned between years as units (month `p` of year `y`
/// receives month `p` of the year permuted into `y`'s slot). Blocks shorter
/// than 12 months (partial edge years) stay in place.
fn shuffle_year_blocks<F: Real>(
    bounds: &[BoundRecord<F>],
    result: &mut [BoundRecord<F>],
    rng: &mut ChaCha8Rng,
) {
    let mut by_asset: BTreeMap<&AssetId, Vec<usize>> = BTreeMap::new();
    for (i, b) in bounds.iter().enumerate() {
        by_asset.entry(&b.asset).or_default().push(i);
    }
    for mut idx in by_asset.into_values() {
        idx.sort_by_key(|&i| bounds[i].month);
        // blocks of 12 consecutive observed months, anchored at the asset's
        // first month
        let first = bounds[idx[0]].month.0;
        let mut blocks: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for i in idx {
            blocks.entry((bounds[i].month.0 - first).div_euclid(12)).or_default().push(i);
        }
        let full: Vec<Vec<usize>> = blocks.into_values().filter(|b| b.len() == 12).collect();
        if full.len() < 2 {
            continue;
        }
        let mut source: Vec<usize> = (0..full.len()).collect();
        fisher_yates(&mut source, rng);
        for (dest_block, &src_block) in source.iter().enumerate() {
            for p in 0..12 {
                let dest = full[dest_block][p];
                let src = full[src_block][p];
                result[dest] = bounds[dest].with_half_width(bounds[src].half_width);
            }
        }
    }
}
