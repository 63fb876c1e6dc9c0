//! Preprocessing: monthly cross-sectional quantile transform of firm
//! features, and broadcasting a macro table onto the panel.

use std::collections::BTreeMap;

use crate::scalar::{mean, sample_sd, Real};

use super::{MonthId, PanelDataset, PanelError};

/// Replace every feature with its cross-sectional quantile rank, month by month.
///
/// Within each month, a feature's values are ranked ascending (ties receive
/// the mean of their tied ranks) and mapped to `2*(rank - 1)/(N - 1) - 1`,
/// so the transformed values lie in [-1, 1]. A month with a single asset
/// maps to 0. The transform is invariant to strictly monotone rescalings of
/// the raw feature within a month.
pub fn quantile_transform<F: Real>(panel: &PanelDataset<F>) -> PanelDataset<F> {
    let mut observations = panel.observations().to_vec();
    let n_features = panel.feature_names().len();

    let mut month_start = 0usize;
    while month_start < observations.len() {
        let month = observations[month_start].month;
        let month_end = observations[month_start..]
            .iter()
            .position(|o| o.month != month)
            .map_or(observations.len(), |p| month_start + p);
        let n = month_end - month_start;

        for j in 0..n_features {
            let ranks = mean_tied_ranks(
                &observations[month_start..month_end]
                    .iter()
                    .map(|o| o.features[j])
                    .collect::<Vec<_>>(),
            );
            for (obs, rank) in observations[month_start..month_end].iter_mut().zip(&ranks) {
                obs.features[j] = if n == 1 {
                    F::zero()
                } else {
                    F::from_f64(2.0 * (rank - 1.0) / (n as f64 - 1.0) - 1.0)
                };
            }
        }
        month_start = month_end;
    }

    PanelDataset::new(
        observations,
        panel.feature_names().to_vec(),
        panel.macro_names().to_vec(),
    )
    .expect("quantile transform preserves panel invariants")
}

/// Ascending 1-based ranks with ties assigned the mean of their tied ranks.
pub(crate) fn mean_tied_ranks<F: Real>(values: &[F]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite feature values"));

    let mut ranks = vec![0.0f64; n];
    let mut i = 0usize;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mean of ranks i+1..=j+1
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Attach a macro vector to every observation, broadcasting by month.
///
/// `macro_table` must cover every month of the panel. With `standardize`,
/// each macro series is replaced by its time-series z-score over the panel's
/// month span (sample standard deviation); a constant series is an error.
pub fn merge_macro<F: Real>(
    panel: &PanelDataset<F>,
    macro_names: &[String],
    macro_table: &BTreeMap<MonthId, Vec<F>>,
    standardize: bool,
) -> Result<PanelDataset<F>, PanelError> {
    for &month in panel.month_index() {
        match macro_table.get(&month) {
            None => return Err(PanelError::MacroCoverage { month }),
            Some(v) if v.len() != macro_names.len() => {
                return Err(PanelError::MacroLength {
                    asset: String::new(),
                    month,
                    expected: macro_names.len(),
                    actual: v.len(),
                })
            }
            Some(_) => {}
        }
    }

    let months = panel.month_index();
    let mut columns: Vec<Vec<F>> = vec![Vec::with_capacity(months.len()); macro_names.len()];
    for &month in months {
        for (j, &v) in macro_table[&month].iter().enumerate() {
            columns[j].push(v);
        }
    }

    if standardize {
        for (j, col) in columns.iter_mut().enumerate() {
            let m = mean(col);
            let sd = sample_sd(col);
            if sd == F::zero() {
                return Err(PanelError::ZeroVarianceMacro { name: macro_names[j].clone() });
            }
            for v in col.iter_mut() {
                *v = (*v - m) / sd;
            }
        }
    }

    let month_pos: BTreeMap<MonthId, usize> =
        months.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let observations = panel
        .observations()
        .iter()
        .map(|o| {
            let t = month_pos[&o.month];
            let mut obs = o.clone();
            obs.macro_vars = columns.iter().map(|c| c[t]).collect();
            obs
        })
        .collect();

    PanelDataset::new(
        observations,
        panel.feature_names().to_vec(),
        macro_names.to_vec(),
    )
}
