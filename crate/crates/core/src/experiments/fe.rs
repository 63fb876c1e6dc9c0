//! Panel fixed-effects regression (within estimator) with
//! heteroskedasticity-robust standard errors.
//!
//! All variables are demeaned by firm, OLS runs on the demeaned system, and
//! HC1 standard errors scale the sandwich by `n / (n - k)` where `k` counts
//! the slope terms plus the absorbed firm effects. Firms with a single
//! observation are dropped (their demeaned rows are identically zero).

use std::collections::BTreeMap;

use crate::linalg::{spd_inverse, symmetric_eigen, Mat};
use crate::panel::AssetId;
use crate::scalar::Real;

use super::ExperimentsError;

/// One regressor column with its display name.
#[derive(Debug, Clone, PartialEq)]
pub struct FeTerm<F> {
    pub name: String,
    pub values: Vec<F>,
}

impl<F: Real> FeTerm<F> {
    pub fn new(name: impl Into<String>, values: Vec<F>) -> Self {
        Self { name: name.into(), values }
    }

    /// Element-wise interaction `self * other`, named `"a:b"`.
    pub fn interact(&self, other: &FeTerm<F>) -> FeTerm<F> {
        FeTerm {
            name: format!("{}:{}", self.name, other.name),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FERegressionResult<F> {
    pub coefficients: BTreeMap<String, F>,
    pub z_stats: BTreeMap<String, F>,
    pub n_obs: usize,
    pub n_firms: usize,
    pub n_singleton_firms_dropped: usize,
    pub terms: Vec<String>,
}

pub fn fe_regression<F: Real>(
    firms: &[AssetId],
    y: &[F],
    terms: &[FeTerm<F>],
) -> Result<FERegressionResult<F>, ExperimentsError> {
    let n_raw = y.len();
    if firms.len() != n_raw {
        return Err(ExperimentsError::TermMismatch {
            context: format!("{} firm ids vs {} observations", firms.len(), n_raw),
        });
    }
    for t in terms {
        if t.values.len() != n_raw {
            return Err(ExperimentsError::TermMismatch {
                context: format!("term {} has {} values, expected {}", t.name, t.values.len(), n_raw),
            });
        }
    }

    // Group observation indices by firm; drop singletons.
    let mut by_firm: BTreeMap<&AssetId, Vec<usize>> = BTreeMap::new();
    for (i, firm) in firms.iter().enumerate() {
        by_firm.entry(firm).or_default().push(i);
    }
    let n_singleton_firms_dropped = by_firm.values().filter(|idx| idx.len() < 2).count();
    by_firm.retain(|_, idx| idx.len() >= 2);
    let n_firms = by_firm.len();
    let keep: Vec<usize> = by_firm.values().flatten().copied().collect();
    let n = keep.len();
    let p = terms.len();
    let k_absorbed = p + n_firms;
    if n <= k_absorbed {
        return Err(ExperimentsError::TooFewObservations { n, k: k_absorbed });
    }

    // Within transform: demean y and every term by firm.
    let mut y_w = vec![F::zero(); n];
    let mut x_w = Mat::zeros(n, p);
    {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        for idx in by_firm.values() {
            let m = F::from_usize(idx.len());
            let y_mean: F = idx.iter().map(|&i| y[i]).sum::<F>() / m;
            for &i in idx {
                y_w[pos[&i]] = y[i] - y_mean;
            }
            for (j, term) in terms.iter().enumerate() {
                let t_mean: F = idx.iter().map(|&i| term.values[i]).sum::<F>() / m;
                for &i in idx {
                    x_w.set(pos[&i], j, term.values[i] - t_mean);
                }
            }
        }
    }

    let gram = x_w.gram();

    // Collinearity diagnostics: near-null eigenvectors of the demeaned Gram
    // name the dependent terms (a firm-constant regressor demeans to zero).
    let (eigenvalues, eigenvectors) = symmetric_eigen(&gram);
    let max_eig = eigenvalues.first().copied().unwrap_or(F::zero()).max(F::one());
    let tol = max_eig * F::from_f64(1e-10);
    let mut dependent: Vec<String> = Vec::new();
    for (idx, &ev) in eigenvalues.iter().enumerate() {
        if ev <= tol {
            for j in 0..p {
                if eigenvectors.get(j, idx).abs() > F::from_f64(0.1)
                    && !dependent.contains(&terms[j].name)
                {
                    dependent.push(terms[j].name.clone());
                }
            }
        }
    }
    if !dependent.is_empty() {
        return Err(ExperimentsError::CollinearTerms { terms: dependent });
    }

    let gram_inv = spd_inverse(&gram).map_err(|_| ExperimentsError::CollinearTerms {
        terms: terms.iter().map(|t| t.name.clone()).collect(),
    })?;
    let xty = x_w.tr_mul_vec(&y_w);
    let beta: Vec<F> = (0..p)
        .map(|i| (0..p).map(|j| gram_inv.get(i, j) * xty[j]).sum())
        .collect();

    // HC1 sandwich on the demeaned system.
    let fitted = x_w.mul_vec(&beta);
    let mut meat = Mat::zeros(p, p);
    for r in 0..n {
        let u = y_w[r] - fitted[r];
        let u2 = u * u;
        let row = x_w.row(r);
        for a in 0..p {
            for b in 0..p {
                let v = meat.get(a, b) + u2 * row[a] * row[b];
                meat.set(a, b, v);
            }
        }
    }
    let dof_scale = F::from_usize(n) / F::from_usize(n - k_absorbed);
    let mut coefficients = BTreeMap::new();
    let mut z_stats = BTreeMap::new();
    for (j, term) in terms.iter().enumerate() {
        let mut var = F::zero();
        for a in 0..p {
            for b in 0..p {
                var += gram_inv.get(j, a) * meat.get(a, b) * gram_inv.get(b, j);
            }
        }
        var *= dof_scale;
        let se = var.max(F::zero()).sqrt();
        coefficients.insert(term.name.clone(), beta[j]);
        z_stats.insert(term.name.clone(), if se > F::zero() { beta[j] / se } else { F::zero() });
    }

    Ok(FERegressionResult {
        coefficients,
        z_stats,
        n_obs: n,
        n_firms,
        n_singleton_firms_dropped,
        terms: terms.iter().map(|t| t.name.clone()).collect(),
    })
}
