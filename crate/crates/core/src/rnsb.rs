//! Relative Negative Sentiment Bias.
//!
//! A logistic regression attribute classifier is trained with A1 as the
//! positive examples and A2 as the negative ones, so its predicted
//! probability of the label-1 class is the "negative" probability. Averaging
//! that probability over each target set gives per-set negative probabilities
//! f(T_i); normalizing them yields a distribution D whose KL divergence from
//! uniform (in bits) is the classic score. With exactly two target sets the
//! signed variant `(f(T2) - f(T1)) / (f(T1) + f(T2))` separates stereotypical
//! from anti-stereotypical bias. Scores are averaged over a list of training
//! seeds.

use serde::Serialize;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::logreg::LogisticRegression;

pub const DEFAULT_REGULARIZATION: f64 = 1.0;

/// The protocol trains with ten seeds and averages.
pub fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RnsbResult {
    /// KL divergence of the averaged distribution from uniform, in bits.
    pub kl_value: f64,
    /// Signed two-set variant, only present when there are exactly two
    /// target sets.
    pub signed_value: Option<f64>,
    /// Seed-averaged negative probability per target set.
    pub per_set_negative_probability: Vec<f64>,
}

/// Fit the attribute classifier: A1 words are class 0, A2 words class 1.
pub fn train_attribute_classifier(
    e: &Embedding,
    a1: &[String],
    a2: &[String],
    reg: f64,
    seed: u64,
) -> Result<LogisticRegression> {
    if a1.is_empty() || a2.is_empty() {
        return Err(Error::EmptyWordSet("attribute set".into()));
    }
    let mut features = Vec::with_capacity(a1.len() + a2.len());
    let mut labels = Vec::with_capacity(a1.len() + a2.len());
    for w in a1 {
        features.push(e.vector_of(w)?);
        labels.push(false);
    }
    for w in a2 {
        features.push(e.vector_of(w)?);
        labels.push(true);
    }
    LogisticRegression::train(&features, &labels, reg, seed)
}

/// KL divergence (bits) from uniform and, for two sets, the signed score,
/// computed from per-set negative probabilities.
pub fn rnsb_from_probabilities(per_set: &[f64]) -> Result<(f64, Option<f64>)> {
    if per_set.len() < 2 {
        return Err(Error::TooFewObservations {
            n: per_set.len(),
            min: 2,
        });
    }
    if per_set.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::DegenerateInput(
            "per-set negative probabilities must be positive".into(),
        ));
    }
    let total: f64 = per_set.iter().sum();
    let n = per_set.len() as f64;
    let uniform = 1.0 / n;
    let kl: f64 = per_set
        .iter()
        .map(|p| {
            let d = p / total;
            d * (d / uniform).log2()
        })
        .sum();
    let signed = if per_set.len() == 2 {
        Some((per_set[1] - per_set[0]) / (per_set[0] + per_set[1]))
    } else {
        None
    };
    // rounding can leave a tiny negative residue on a uniform distribution
    Ok((kl.max(0.0), signed))
}

/// Seed-averaged RNSB over N >= 2 target sets.
pub fn rnsb(
    e: &Embedding,
    targets: &[Vec<String>],
    a1: &[String],
    a2: &[String],
    reg: f64,
    seeds: &[u64],
) -> Result<RnsbResult> {
    if targets.len() < 2 {
        return Err(Error::TooFewObservations {
            n: targets.len(),
            min: 2,
        });
    }
    for set in targets {
        if set.is_empty() {
            return Err(Error::EmptyWordSet("target set".into()));
        }
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter(
            "seed list must be non-empty".into(),
        ));
    }

    // resolve once; classifier retraining is the only per-seed work
    let target_vectors: Vec<Vec<Vec<f64>>> = targets
        .iter()
        .map(|set| set.iter().map(|w| e.vector_of(w)).collect())
        .collect::<Result<_>>()?;

    let mut kl_sum = 0.0;
    let mut signed_sum = 0.0;
    let mut per_set_sum = vec![0.0; targets.len()];
    for &seed in seeds {
        let model = train_attribute_classifier(e, a1, a2, reg, seed)?;
        let per_set: Vec<f64> = target_vectors
            .iter()
            .map(|vectors| {
                vectors
                    .iter()
                    .map(|v| model.predict_probability(v))
                    .sum::<f64>()
                    / vectors.len() as f64
            })
            .collect();
        let (kl, signed) = rnsb_from_probabilities(&per_set)?;
        kl_sum += kl;
        if let Some(s) = signed {
            signed_sum += s;
        }
        for (acc, p) in per_set_sum.iter_mut().zip(&per_set) {
            *acc += p;
        }
    }

    let n_seeds = seeds.len() as f64;
    Ok(RnsbResult {
        kl_value: kl_sum / n_seeds,
        signed_value: (targets.len() == 2).then_some(signed_sum / n_seeds),
        per_set_negative_probability: per_set_sum.iter().map(|p| p / n_seeds).collect(),
    })
}
