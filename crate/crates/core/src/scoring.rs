//! Extrinsic bias scoring from prediction records, plus the desk-scale
//! bag-of-embeddings stand-in classifier that produces them.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::corpus::{HateLabel, LabeledCorpus};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::logreg::LogisticRegression;

/// One scored example: gold label, predicted label, group tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub gold: bool,
    pub predicted: bool,
    pub group: String,
}

impl PredictionRecord {
    pub fn new(gold: bool, predicted: bool, group: impl Into<String>) -> Result<Self> {
        let group = group.into();
        if group.is_empty() {
            return Err(Error::InvalidParameter("empty group tag".into()));
        }
        Ok(Self {
            gold,
            predicted,
            group,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Per-group precision/recall/F1, ordered by group name.
#[derive(Debug, Clone, Serialize)]
pub struct GroupScores {
    pub groups: BTreeMap<String, Prf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Precision,
    Recall,
    F1,
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precision" => Ok(Measure::Precision),
            "recall" => Ok(Measure::Recall),
            "f1" => Ok(Measure::F1),
            other => Err(Error::InvalidParameter(format!(
                "unknown measure '{other}' (expected precision, recall or f1)"
            ))),
        }
    }
}

/// Per-group precision, recall and F1 with `positive` as the positive label.
/// Zero-denominator precision and recall are defined as 0, so degenerate
/// groups score rather than error.
pub fn grouped_prf(records: &[PredictionRecord], positive: bool) -> Result<GroupScores> {
    if records.is_empty() {
        return Err(Error::DegenerateInput("no prediction records".into()));
    }
    let mut counts: BTreeMap<&str, (usize, usize, usize, usize)> = BTreeMap::new();
    for r in records {
        let entry = counts.entry(&r.group).or_insert((0, 0, 0, 0));
        entry.3 += 1; // support
        match (r.gold == positive, r.predicted == positive) {
            (true, true) => entry.0 += 1,  // tp
            (false, true) => entry.1 += 1, // fp
            (true, false) => entry.2 += 1, // fn
            (false, false) => {}
        }
    }
    let groups = counts
        .into_iter()
        .map(|(group, (tp, fp, fnc, support))| {
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fnc);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            (
                group.to_string(),
                Prf {
                    precision,
                    recall,
                    f1,
                    support,
                    true_positives: tp,
                    false_positives: fp,
                    false_negatives: fnc,
                },
            )
        })
        .collect();
    Ok(GroupScores { groups })
}

fn ratio(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

/// `measure(group_a) - measure(group_b)`.
pub fn bias_score(
    records: &[PredictionRecord],
    group_a: &str,
    group_b: &str,
    measure: Measure,
    positive: bool,
) -> Result<f64> {
    let scores = grouped_prf(records, positive)?;
    let value = |group: &str| -> Result<f64> {
        let prf = scores
            .groups
            .get(group)
            .ok_or_else(|| Error::MissingGroup(group.to_string()))?;
        Ok(match measure {
            Measure::Precision => prf.precision,
            Measure::Recall => prf.recall,
            Measure::F1 => prf.f1,
        })
    };
    Ok(value(group_a)? - value(group_b)?)
}

/// Logistic regression over mean-of-token-vectors document representations,
/// predicting the hate label (class 1 = HS).
#[derive(Debug, Clone)]
pub struct StandinClassifier {
    pub model: LogisticRegression,
    pub dim: usize,
}

/// Mean of in-vocabulary token vectors; `None` when every token is OOV.
fn document_vector(e: &Embedding, tokens: &[String]) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; e.dim()];
    let mut n = 0usize;
    for token in tokens {
        if let Some(i) = e.index_of(token) {
            for (a, v) in acc.iter_mut().zip(e.row(i)) {
                *a += v;
            }
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    let inv = 1.0 / n as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Some(acc)
}

/// Train the stand-in on every document with at least one in-vocabulary
/// token; fully-OOV documents are dropped from training.
pub fn train_standin_classifier(
    corpus: &LabeledCorpus,
    e: &Embedding,
    reg: f64,
    seed: u64,
) -> Result<StandinClassifier> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for doc in &corpus.documents {
        if let Some(v) = document_vector(e, &doc.tokens) {
            features.push(v);
            labels.push(doc.hate_label == HateLabel::Hs);
        }
    }
    if features.is_empty() {
        return Err(Error::DegenerateInput(
            "every document is out of vocabulary".into(),
        ));
    }
    let model = LogisticRegression::train(&features, &labels, reg, seed)?;
    Ok(StandinClassifier {
        model,
        dim: e.dim(),
    })
}

impl StandinClassifier {
    /// P(HS) for one document; fully-OOV documents fall back to the bias
    /// term alone (the zero vector).
    pub fn predict_probability(&self, e: &Embedding, tokens: &[String]) -> f64 {
        let v = document_vector(e, tokens).unwrap_or_else(|| vec![0.0; self.dim]);
        self.model.predict_probability(&v)
    }
}

/// One record per document: gold hate label, thresholded prediction (0.5),
/// and the document's group label.
pub fn predict_records(
    classifier: &StandinClassifier,
    corpus: &LabeledCorpus,
    e: &Embedding,
) -> Result<Vec<PredictionRecord>> {
    if e.dim() != classifier.dim {
        return Err(Error::DimensionMismatch {
            word: "<embedding>".into(),
            expected: classifier.dim,
            found: e.dim(),
        });
    }
    corpus
        .documents
        .iter()
        .map(|doc| {
            let p = classifier.predict_probability(e, &doc.tokens);
            PredictionRecord::new(doc.hate_label == HateLabel::Hs, p >= 0.5, &doc.group_label)
        })
        .collect()
}

/// CSV with header gold,pred,group and 0/1 labels.
pub fn write_predictions_csv<W: Write>(records: &[PredictionRecord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["gold", "pred", "group"])?;
    for r in records {
        w.write_record([bit(r.gold), bit(r.predicted), &r.group])?;
    }
    w.flush()?;
    Ok(())
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn read_predictions_csv<R: Read>(source: R) -> Result<Vec<PredictionRecord>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse_bit = |i: usize| -> Result<bool> {
            match record.get(i) {
                Some("0") => Ok(false),
                Some("1") => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "expected 0/1 label, got {other:?}"
                ))),
            }
        };
        out.push(PredictionRecord::new(
            parse_bit(0)?,
            parse_bit(1)?,
            record.get(2).unwrap_or_default(),
        )?);
    }
    Ok(out)
}
