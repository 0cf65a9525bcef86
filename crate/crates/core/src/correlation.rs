//! Spearman rank correlation with two-sided permutation p-values.
//!
//! Rho is the Pearson correlation of average-ranked data (ties get mean
//! ranks). The p-value doubles the smaller one-sided tail: exact enumeration
//! of all n! permutations for n <= 8, otherwise seeded Monte Carlo with the
//! +1 correction `p_tail = (1 + hits) / (resamples + 1)`, whose two-sided
//! floor is `2 / (resamples + 1)`.

use std::io::Write;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::runtable::RunTable;
use crate::seed::derive_seed;

pub const DEFAULT_RESAMPLES: usize = 9_999;
/// Largest n for which the permutation null is enumerated exactly (8! = 40320).
pub const EXACT_ENUMERATION_LIMIT: usize = 8;
/// Comparison slack when counting permutations at least as extreme.
const TIE_EPSILON: f64 = 1e-12;

/// Average ranks (1-based), ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // mean of ranks i+1 ..= j+1
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean;
        }
        i = j + 1;
    }
    ranks
}

fn validate_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations { n: x.len(), min: 3 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite observation".into()));
    }
    Ok(())
}

fn centered(ranks: &[f64]) -> Result<Vec<f64>> {
    let mean = ranks.iter().sum::<f64>() / ranks.len() as f64;
    let c: Vec<f64> = ranks.iter().map(|r| r - mean).collect();
    if c.iter().all(|v| v.abs() < 1e-300) {
        return Err(Error::DegenerateInput(
            "constant input has no rank variance".into(),
        ));
    }
    Ok(c)
}

fn pearson_of_centered(cx: &[f64], cy: &[f64]) -> f64 {
    let num: f64 = cx.iter().zip(cy).map(|(a, b)| a * b).sum();
    let sx: f64 = cx.iter().map(|a| a * a).sum();
    let sy: f64 = cy.iter().map(|a| a * a).sum();
    num / (sx * sy).sqrt()
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    validate_pair(x, y)?;
    let cx = centered(&average_ranks(x))?;
    let cy = centered(&average_ranks(y))?;
    Ok(pearson_of_centered(&cx, &cy))
}

/// Two-sided permutation p-value for the observed Spearman rho.
pub fn permutation_pvalue(x: &[f64], y: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    validate_pair(x, y)?;
    if resamples == 0 {
        return Err(Error::InvalidParameter("resamples must be >= 1".into()));
    }
    let cx = centered(&average_ranks(x))?;
    let cy = centered(&average_ranks(y))?;
    let rho_obs = pearson_of_centered(&cx, &cy);
    let n = x.len();

    let mut greater = 0u64; // rho_perm >= rho_obs
    let mut less = 0u64; // rho_perm <= rho_obs
    let total: u64 = if n <= EXACT_ENUMERATION_LIMIT {
        let mut count = 0u64;
        for perm in (0..n).permutations(n) {
            let permuted: Vec<f64> = perm.iter().map(|&i| cy[i]).collect();
            let rho = pearson_of_centered(&cx, &permuted);
            if rho >= rho_obs - TIE_EPSILON {
                greater += 1;
            }
            if rho <= rho_obs + TIE_EPSILON {
                less += 1;
            }
            count += 1;
        }
        count
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut permuted = cy.clone();
        for _ in 0..resamples {
            permuted.shuffle(&mut rng);
            let rho = pearson_of_centered(&cx, &permuted);
            if rho >= rho_obs - TIE_EPSILON {
                greater += 1;
            }
            if rho <= rho_obs + TIE_EPSILON {
                less += 1;
            }
        }
        // the observed statistic counts as one resample in each tail
        greater += 1;
        less += 1;
        resamples as u64 + 1
    };

    let tail = greater.min(less) as f64 / total as f64;
    Ok((2.0 * tail).min(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationCell {
    pub intrinsic_metric: String,
    pub extrinsic_metric: String,
    /// Absent when the cell is invalid (fewer than 3 complete pairs, or a
    /// constant column).
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    /// Complete pairs backing the cell.
    pub n: usize,
}

/// One cell per (intrinsic, extrinsic) column pair. Rows missing either cell
/// value are dropped pairwise; under-populated or degenerate cells are
/// flagged invalid rather than failing the grid.
pub fn correlate_table(
    table: &RunTable,
    intrinsic_cols: &[String],
    extrinsic_cols: &[String],
    resamples: usize,
    master_seed: u64,
) -> Result<Vec<CorrelationCell>> {
    let mut cells = Vec::new();
    for icol in intrinsic_cols {
        for ecol in extrinsic_cols {
            let pairs = table.paired_column_values(icol, ecol)?;
            let x: Vec<f64> = pairs.iter().map(|(_, a, _)| *a).collect();
            let y: Vec<f64> = pairs.iter().map(|(_, _, b)| *b).collect();
            let seed = derive_seed(master_seed, &format!("cell:{icol}:{ecol}"));
            let cell = match spearman_rho(&x, &y) {
                Ok(rho) => {
                    let p = permutation_pvalue(&x, &y, resamples, seed)?;
                    CorrelationCell {
                        intrinsic_metric: icol.clone(),
                        extrinsic_metric: ecol.clone(),
                        rho: Some(rho),
                        p_value: Some(p),
                        n: x.len(),
                    }
                }
                Err(Error::TooFewObservations { .. }) | Err(Error::DegenerateInput(_)) => {
                    CorrelationCell {
                        intrinsic_metric: icol.clone(),
                        extrinsic_metric: ecol.clone(),
                        rho: None,
                        p_value: None,
                        n: x.len(),
                    }
                }
                Err(e) => return Err(e),
            };
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Grid CSV with columns intrinsic,extrinsic,rho,p_value,n; invalid cells
/// leave rho and p_value empty.
pub fn write_correlation_csv<W: Write>(cells: &[CorrelationCell], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["intrinsic", "extrinsic", "rho", "p_value", "n"])?;
    for c in cells {
        w.write_record([
            c.intrinsic_metric.as_str(),
            c.extrinsic_metric.as_str(),
            &c.rho.map(|v| v.to_string()).unwrap_or_default(),
            &c.p_value.map(|v| v.to_string()).unwrap_or_default(),
            &c.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scatter rows (variant_id, x, y) for all complete pairs, in table order.
pub fn emit_scatter(table: &RunTable, x_col: &str, y_col: &str) -> Result<Vec<(String, f64, f64)>> {
    table.paired_column_values(x_col, y_col)
}

pub fn write_scatter_csv<W: Write>(
    rows: &[(String, f64, f64)],
    x_col: &str,
    y_col: &str,
    sink: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["variant_id", x_col, y_col])?;
    for (id, x, y) in rows {
        w.write_record([id.as_str(), &x.to_string(), &y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
