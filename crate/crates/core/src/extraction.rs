//! PMI word extraction from labeled corpora.
//!
//! A Naive Bayes generative model is estimated over the chosen label axis:
//! class priors from document counts and per-class categorical token
//! distributions with optional add-alpha smoothing. The PMI of a label l and
//! word w is `log2(theta[l][w] / sum_l' mu[l'] * theta[l'][w])`. Candidates
//! are ranked by PMI, filtered by a document-frequency floor, tie-broken by
//! corpus frequency and then alphabetically.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::corpus::{Axis, LabeledCorpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NaiveBayesParams {
    pub labels: Vec<String>,
    /// Class priors, parallel to `labels`, summing to 1.
    pub priors: Vec<f64>,
    pub vocabulary: Vec<String>,
    vocab_index: HashMap<String, usize>,
    /// Per class: categorical distribution over `vocabulary`.
    pub token_probs: Vec<Vec<f64>>,
    pub alpha: f64,
}

impl NaiveBayesParams {
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.vocab_index.get(word).copied()
    }
}

/// Estimate priors and token distributions on the given axis.
///
/// On the group axis, documents with neutral/other group labels are out of
/// scope and ignored entirely; the vocabulary covers in-scope documents only.
pub fn estimate_nb(corpus: &LabeledCorpus, axis: Axis, alpha: f64) -> Result<NaiveBayesParams> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be >= 0".into()));
    }

    // label -> index, in first-seen order for determinism
    let mut labels: Vec<String> = Vec::new();
    let mut doc_counts: Vec<usize> = Vec::new();
    let mut vocabulary: Vec<String> = Vec::new();
    let mut vocab_index: HashMap<String, usize> = HashMap::new();
    // token counts per (label, word)
    let mut counts: Vec<HashMap<usize, u64>> = Vec::new();
    let mut token_totals: Vec<u64> = Vec::new();

    let mut in_scope = 0usize;
    for doc in &corpus.documents {
        let Some(label) = LabeledCorpus::axis_label(doc, axis) else {
            continue;
        };
        in_scope += 1;
        let li = match labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                labels.push(label.to_string());
                doc_counts.push(0);
                counts.push(HashMap::new());
                token_totals.push(0);
                labels.len() - 1
            }
        };
        doc_counts[li] += 1;
        for token in &doc.tokens {
            let wi = *vocab_index.entry(token.clone()).or_insert_with(|| {
                vocabulary.push(token.clone());
                vocabulary.len() - 1
            });
            *counts[li].entry(wi).or_insert(0) += 1;
            token_totals[li] += 1;
        }
    }

    if in_scope == 0 {
        return Err(Error::EmptyCorpus);
    }
    if labels.len() < 2 {
        return Err(Error::EmptyClass(format!(
            "need at least two classes on the axis, found {:?}",
            labels
        )));
    }

    let priors: Vec<f64> = doc_counts
        .iter()
        .map(|&c| c as f64 / in_scope as f64)
        .collect();
    let v = vocabulary.len() as f64;
    let token_probs: Vec<Vec<f64>> = counts
        .iter()
        .zip(&token_totals)
        .map(|(class_counts, &total)| {
            let denom = total as f64 + alpha * v;
            (0..vocabulary.len())
                .map(|wi| {
                    let c = class_counts.get(&wi).copied().unwrap_or(0) as f64;
                    (c + alpha) / denom
                })
                .collect()
        })
        .collect();

    Ok(NaiveBayesParams {
        labels,
        priors,
        vocabulary,
        vocab_index,
        token_probs,
        alpha,
    })
}

/// PMI of (label, word) in bits. With alpha = 0 a word absent from the class
/// has PMI -inf; a word with zero probability under every class is an error.
pub fn pmi(params: &NaiveBayesParams, label: &str, word: &str) -> Result<f64> {
    let li = params
        .label_index(label)
        .ok_or_else(|| Error::EmptyClass(label.to_string()))?;
    let wi = params
        .word_index(word)
        .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
    let marginal: f64 = params
        .priors
        .iter()
        .zip(&params.token_probs)
        .map(|(mu, theta)| mu * theta[wi])
        .sum();
    if marginal <= 0.0 {
        return Err(Error::UndefinedPmi(word.to_string()));
    }
    Ok((params.token_probs[li][wi] / marginal).log2())
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateWord {
    pub word: String,
    /// PMI with the extraction label, in bits.
    pub pmi: f64,
    /// Documents (within axis scope) containing the word at least once.
    pub document_frequency: usize,
    /// Total token occurrences within axis scope.
    pub corpus_frequency: usize,
}

/// Top candidates for one label: PMI descending, then corpus frequency
/// descending, then word ascending; words under the document-frequency floor
/// are dropped before ranking.
pub fn extract_candidates(
    corpus: &LabeledCorpus,
    axis: Axis,
    label: &str,
    top_n: usize,
    min_docs: usize,
    alpha: f64,
) -> Result<Vec<CandidateWord>> {
    if top_n == 0 {
        return Err(Error::InvalidParameter("top_n must be at least 1".into()));
    }
    let params = estimate_nb(corpus, axis, alpha)?;
    if params.label_index(label).is_none() {
        return Err(Error::EmptyClass(label.to_string()));
    }

    let mut doc_freq: HashMap<&str, usize> = HashMap::new();
    let mut corpus_freq: HashMap<&str, usize> = HashMap::new();
    for doc in &corpus.documents {
        if LabeledCorpus::axis_label(doc, axis).is_none() {
            continue;
        }
        let mut seen: Vec<&str> = Vec::new();
        for token in &doc.tokens {
            *corpus_freq.entry(token).or_insert(0) += 1;
            if !seen.contains(&token.as_str()) {
                seen.push(token);
                *doc_freq.entry(token).or_insert(0) += 1;
            }
        }
    }

    let mut candidates: Vec<CandidateWord> = Vec::new();
    for word in &params.vocabulary {
        let df = doc_freq.get(word.as_str()).copied().unwrap_or(0);
        if df < min_docs {
            continue;
        }
        candidates.push(CandidateWord {
            word: word.clone(),
            pmi: pmi(&params, label, word)?,
            document_frequency: df,
            corpus_frequency: corpus_freq.get(word.as_str()).copied().unwrap_or(0),
        });
    }
    candidates.sort_by(|a, b| {
        b.pmi
            .total_cmp(&a.pmi)
            .then(b.corpus_frequency.cmp(&a.corpus_frequency))
            .then(a.word.cmp(&b.word))
    });
    candidates.truncate(top_n);
    Ok(candidates)
}

/// Apply recorded curation decisions: drop excluded candidates, append the
/// extra words, and cut to exactly `final_n`.
pub fn apply_curation(
    candidates: &[CandidateWord],
    exclude: &[String],
    include_extra: &[String],
    final_n: usize,
) -> Result<Vec<String>> {
    if final_n == 0 {
        return Err(Error::InvalidParameter("final_n must be at least 1".into()));
    }
    let mut words: Vec<String> = candidates
        .iter()
        .filter(|c| !exclude.contains(&c.word))
        .map(|c| c.word.clone())
        .collect();
    words.extend(include_extra.iter().cloned());
    if words.len() < final_n {
        return Err(Error::InsufficientWords {
            needed: final_n,
            available: words.len(),
        });
    }
    words.truncate(final_n);
    Ok(words)
}

/// CSV with columns word,pmi_bits,doc_freq,corpus_freq.
pub fn write_candidates_csv<W: Write>(candidates: &[CandidateWord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["word", "pmi_bits", "doc_freq", "corpus_freq"])?;
    for c in candidates {
        w.write_record([
            c.word.as_str(),
            &c.pmi.to_string(),
            &c.document_frequency.to_string(),
            &c.corpus_frequency.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_candidates_csv<R: Read>(source: R) -> Result<Vec<CandidateWord>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse_err = || Error::InvalidParameter(format!("bad candidate row: {record:?}"));
        out.push(CandidateWord {
            word: record.get(0).ok_or_else(parse_err)?.to_string(),
            pmi: record
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(parse_err)?,
            document_frequency: record
                .get(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(parse_err)?,
            corpus_frequency: record
                .get(3)
                .and_then(|s| s.parse().ok())
                .ok_or_else(parse_err)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{HateLabel, LabeledDocument};

    fn doc(tokens: &[&str], hate: HateLabel, group: &str) -> LabeledDocument {
        LabeledDocument {
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            hate_label: hate,
            group_label: group.into(),
        }
    }

    fn tiny_corpus() -> LabeledCorpus {
        LabeledCorpus::new(vec![
            doc(&["bad", "day"], HateLabel::Hs, "MALE"),
            doc(&["bad", "vibes"], HateLabel::Hs, "FEMALE"),
            doc(&["good", "day"], HateLabel::NonHs, "MALE"),
            doc(&["good", "vibes"], HateLabel::NonHs, "NEUTRAL"),
        ])
        .unwrap()
    }

    #[test]
    fn priors_from_document_counts() {
        let params = estimate_nb(&tiny_corpus(), Axis::Hate, 0.0).unwrap();
        assert_eq!(params.labels, vec!["HS".to_string(), "NON_HS".into()]);
        assert_eq!(params.priors, vec![0.5, 0.5]);
        // each class distribution sums to one
        for theta in &params.token_probs {
            let total: f64 = theta.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn group_axis_drops_neutral_documents() {
        let params = estimate_nb(&tiny_corpus(), Axis::Group, 0.0).unwrap();
        assert_eq!(params.labels, vec!["MALE".to_string(), "FEMALE".into()]);
        // 3 in-scope docs: 2 MALE, 1 FEMALE
        assert!((params.priors[0] - 2.0 / 3.0).abs() < 1e-12);
        // 'good vibes' belongs to the neutral doc only, so 'vibes' appears
        // once (in the FEMALE doc)
        let wi = params.word_index("vibes").unwrap();
        assert!((params.token_probs[1][wi] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unsmoothed_absent_word_has_zero_probability() {
        let params = estimate_nb(&tiny_corpus(), Axis::Hate, 0.0).unwrap();
        let wi = params.word_index("good").unwrap();
        assert_eq!(params.token_probs[0][wi], 0.0);
    }

    #[test]
    fn pmi_hand_case_and_bound() {
        let params = estimate_nb(&tiny_corpus(), Axis::Hate, 0.0).unwrap();
        // 'bad' occurs only in HS docs and priors are (1/2, 1/2)
        let v = pmi(&params, "HS", "bad").unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // class-exclusive words meet the -log2(mu) bound exactly
        assert!((v - (-params.priors[0].log2())).abs() < 1e-12);
        // equal probabilities under both classes give zero PMI
        let d = pmi(&params, "HS", "day").unwrap();
        assert!(d.abs() < 1e-12);
        // absent from HS entirely: -inf under alpha = 0
        assert_eq!(pmi(&params, "HS", "good").unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn pmi_bound_and_reconstruction_hold_corpus_wide() {
        for alpha in [0.0, 0.5] {
            let params = estimate_nb(&tiny_corpus(), Axis::Hate, alpha).unwrap();
            for (li, label) in params.labels.clone().iter().enumerate() {
                for word in &params.vocabulary {
                    let v = pmi(&params, label, word).unwrap();
                    assert!(v <= -params.priors[li].log2() + 1e-12);
                    // 2^pmi * marginal reconstructs theta exactly
                    let wi = params.word_index(word).unwrap();
                    let marginal: f64 = params
                        .priors
                        .iter()
                        .zip(&params.token_probs)
                        .map(|(mu, th)| mu * th[wi])
                        .sum();
                    let recon = v.exp2() * marginal;
                    assert!((recon - params.token_probs[li][wi]).abs() < 1e-9);
                }
            }
        }
    }

    /// Independent counting script for a 20-document corpus.
    #[test]
    fn theta_matches_brute_force_counts() {
        let mut docs = Vec::new();
        let words = ["alpha", "beta", "gamma", "delta"];
        for i in 0..20 {
            let hate = if i % 2 == 0 {
                HateLabel::Hs
            } else {
                HateLabel::NonHs
            };
            let tokens: Vec<&str> = (0..3).map(|j| words[(i + j * j) % 4]).collect();
            docs.push(doc(&tokens, hate, "G"));
        }
        let corpus = LabeledCorpus::new(docs.clone()).unwrap();
        let params = estimate_nb(&corpus, Axis::Hate, 0.0).unwrap();

        for (li, label) in [(0, HateLabel::Hs), (1, HateLabel::NonHs)] {
            assert_eq!(params.labels[li], label.as_str());
            let mut counts: HashMap<String, usize> = HashMap::new();
            let mut total = 0usize;
            for d in docs.iter().filter(|d| d.hate_label == label) {
                for t in &d.tokens {
                    *counts.entry(t.clone()).or_insert(0) += 1;
                    total += 1;
                }
            }
            for word in &params.vocabulary {
                let expect = counts.get(word).copied().unwrap_or(0) as f64 / total as f64;
                let wi = params.word_index(word).unwrap();
                assert!((params.token_probs[li][wi] - expect).abs() < 1e-12);
            }
        }
    }

    fn planted_corpus(planted_docs: usize) -> LabeledCorpus {
        let mut docs = Vec::new();
        for i in 0..40 {
            let mut tokens = vec!["filler", "common"];
            let hate = if i % 2 == 0 {
                if i / 2 < planted_docs {
                    tokens.push("planted");
                }
                HateLabel::Hs
            } else {
                HateLabel::NonHs
            };
            docs.push(doc(&tokens, hate, "G"));
        }
        LabeledCorpus::new(docs).unwrap()
    }

    #[test]
    fn planted_word_ranks_first() {
        let corpus = planted_corpus(12);
        let cands = extract_candidates(&corpus, Axis::Hate, "HS", 40, 10, 0.0).unwrap();
        assert_eq!(cands[0].word, "planted");
        assert!(cands[0].document_frequency >= 10);
    }

    #[test]
    fn document_frequency_floor_excludes_rare_words() {
        let corpus = planted_corpus(9);
        let cands = extract_candidates(&corpus, Axis::Hate, "HS", 40, 10, 0.0).unwrap();
        assert!(cands.iter().all(|c| c.word != "planted"));
    }

    #[test]
    fn ties_break_by_frequency_then_word() {
        let mut docs = Vec::new();
        // 'loud' appears twice per HS doc, 'quiet' once: same PMI, different
        // corpus frequency
        for _ in 0..10 {
            docs.push(doc(&["loud", "loud", "quiet", "base"], HateLabel::Hs, "G"));
            docs.push(doc(&["base"], HateLabel::NonHs, "G"));
        }
        let corpus = LabeledCorpus::new(docs).unwrap();
        let cands = extract_candidates(&corpus, Axis::Hate, "HS", 10, 10, 0.0).unwrap();
        assert_eq!(cands[0].word, "loud");
        assert_eq!(cands[1].word, "quiet");
        assert!(cands[0].pmi == cands[1].pmi);
        // determinism
        let again = extract_candidates(&corpus, Axis::Hate, "HS", 10, 10, 0.0).unwrap();
        let words: Vec<_> = cands.iter().map(|c| &c.word).collect();
        let words_again: Vec<_> = again.iter().map(|c| &c.word).collect();
        assert_eq!(words, words_again);
    }

    fn cand(word: &str) -> CandidateWord {
        CandidateWord {
            word: word.into(),
            pmi: 1.0,
            document_frequency: 10,
            corpus_frequency: 10,
        }
    }

    #[test]
    fn curation_identity_exclusion_and_extension() {
        let cands: Vec<CandidateWord> = ["a", "b", "c"].iter().map(|w| cand(w)).collect();
        let got = apply_curation(&cands, &[], &[], 3).unwrap();
        assert_eq!(got, vec!["a".to_string(), "b".into(), "c".into()]);

        let got = apply_curation(&cands, &["a".to_string()], &[], 2).unwrap();
        assert_eq!(got, vec!["b".to_string(), "c".into()]);

        let got = apply_curation(&cands, &["a".to_string()], &["z".to_string()], 3).unwrap();
        assert_eq!(got, vec!["b".to_string(), "c".into(), "z".into()]);

        assert!(matches!(
            apply_curation(&cands, &["a".to_string(), "b".into()], &[], 3).unwrap_err(),
            Error::InsufficientWords { .. }
        ));
    }

    #[test]
    fn candidates_csv_round_trip() {
        let corpus = planted_corpus(12);
        let cands = extract_candidates(&corpus, Axis::Hate, "HS", 5, 1, 0.5).unwrap();
        let mut buf = Vec::new();
        write_candidates_csv(&cands, &mut buf).unwrap();
        let back = read_candidates_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), cands.len());
        for (a, b) in cands.iter().zip(&back) {
            assert_eq!(a.word, b.word);
            assert_eq!(a.pmi, b.pmi);
            assert_eq!(a.document_frequency, b.document_frequency);
        }
    }
}
