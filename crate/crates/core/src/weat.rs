//! Word Embedding Association Test.
//!
//! For target sets T1, T2 and attribute sets A1, A2, each target expression t
//! gets the differential association
//! `s(t) = mean_{a in A1} cos(t, a) - mean_{a in A2} cos(t, a)`.
//! The raw statistic is `sum_{T1} s(t) - sum_{T2} s(t)`; the effect size is
//! `(mean_{T1} s - mean_{T2} s) / std s` with the population standard
//! deviation taken over T1 ∪ T2, which bounds the effect size by ±2.

use serde::Serialize;

use crate::embedding::{cosine_of, Embedding};
use crate::error::{Error, Result};
use crate::wordsets::WordSetQuad;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeatResult {
    pub statistic: f64,
    pub effect_size: f64,
}

/// Differential association of one target expression with the two attribute sets.
pub fn weat_association(e: &Embedding, t: &str, a1: &[String], a2: &[String]) -> Result<f64> {
    let tv = e.vector_of(t)?;
    Ok(mean_cosine(e, &tv, a1)? - mean_cosine(e, &tv, a2)?)
}

fn mean_cosine(e: &Embedding, tv: &[f64], attrs: &[String]) -> Result<f64> {
    if attrs.is_empty() {
        return Err(Error::EmptyWordSet("attribute set".into()));
    }
    let mut sum = 0.0;
    for a in attrs {
        sum += cosine_of(tv, &e.vector_of(a)?)?;
    }
    Ok(sum / attrs.len() as f64)
}

pub fn weat(e: &Embedding, quad: &WordSetQuad) -> Result<WeatResult> {
    if quad.t1.len() != quad.t2.len() {
        return Err(Error::TargetSizeMismatch {
            t1: quad.t1.len(),
            t2: quad.t2.len(),
        });
    }
    if quad.t1.len() < 2 {
        return Err(Error::TooFewObservations {
            n: quad.t1.len(),
            min: 2,
        });
    }

    let assoc = |set: &[String]| -> Result<Vec<f64>> {
        set.iter()
            .map(|t| weat_association(e, t, &quad.a1, &quad.a2))
            .collect()
    };
    let s1 = assoc(&quad.t1)?;
    let s2 = assoc(&quad.t2)?;

    let sum1: f64 = s1.iter().sum();
    let sum2: f64 = s2.iter().sum();
    let mean1 = sum1 / s1.len() as f64;
    let mean2 = sum2 / s2.len() as f64;

    let n = (s1.len() + s2.len()) as f64;
    let grand_mean = (sum1 + sum2) / n;
    let variance = s1
        .iter()
        .chain(&s2)
        .map(|s| (s - grand_mean).powi(2))
        .sum::<f64>()
        / n;
    let std = variance.sqrt();
    if std == 0.0 {
        return Err(Error::DegenerateInput(
            "all target associations are identical; effect size is undefined".into(),
        ));
    }

    Ok(WeatResult {
        statistic: sum1 - sum2,
        effect_size: (mean1 - mean2) / std,
    })
}
