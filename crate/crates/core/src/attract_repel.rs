//! Margin-based vector specialization: pull designated "synonym" pairs
//! together, push "antonym" pairs apart, regularized toward the original
//! vectors.
//!
//! For bias modification the pairs come from the word-set quad: debiasing
//! sets T1xA2 and T2xA1 as synonyms and T1xA1 and T2xA2 as antonyms;
//! over-biasing swaps the two. Each epoch shuffles the pairs into seeded
//! mini-batches; every pair is scored with hinge costs against its hardest
//! in-batch negative (most similar for synonyms, least similar for
//! antonyms), and every updated word is pulled back toward its initial
//! vector by an exact proximal step of `lambda * ||x - x_init||^2`, which
//! stays stable for arbitrarily large lambda. All vectors are renormalized
//! to unit length after every epoch.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::balance::Mode;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::wordsets::WordSetQuad;

const SGD_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AttractRepelConfig {
    pub delta_sim: f64,
    pub delta_ant: f64,
    pub lambda: f64,
    pub syn_batch: usize,
    pub ant_batch: usize,
    pub epochs: usize,
    pub mode: Mode,
    pub seed: u64,
}

impl Default for AttractRepelConfig {
    fn default() -> Self {
        Self {
            delta_sim: 1.0,
            delta_ant: 1.0,
            lambda: 1e-2,
            syn_batch: 50,
            ant_batch: 50,
            epochs: 50,
            mode: Mode::Debias,
            seed: 0,
        }
    }
}

impl AttractRepelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta_sim < 0.0 || self.delta_ant < 0.0 {
            return Err(Error::InvalidParameter("margins must be >= 0".into()));
        }
        if self.lambda <= 0.0 {
            return Err(Error::InvalidParameter("lambda must be > 0".into()));
        }
        if self.syn_batch == 0 || self.ant_batch == 0 {
            return Err(Error::InvalidParameter("batch sizes must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Word pairs fed to the specialization, (left, right) per pair.
pub type WordPairs = Vec<(String, String)>;

/// Cross-product pair construction from the quad. Debias: synonyms T1xA2 and
/// T2xA1, antonyms T1xA1 and T2xA2. Overbias swaps synonym and antonym sets.
pub fn build_pairs(quad: &WordSetQuad, mode: Mode) -> (WordPairs, WordPairs) {
    let cross = |xs: &[String], ys: &[String]| -> WordPairs {
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    };
    let mut crossed = cross(&quad.t1, &quad.a2);
    crossed.extend(cross(&quad.t2, &quad.a1));
    let mut aligned = cross(&quad.t1, &quad.a1);
    aligned.extend(cross(&quad.t2, &quad.a2));
    match mode {
        Mode::Debias => (crossed, aligned),
        Mode::Overbias => (aligned, crossed),
    }
}

/// Run the specialization and return a new embedding with the same
/// vocabulary, dimension and word order; every output vector has unit norm.
///
/// Single-word pair entries must be in the vocabulary; multi-word entries
/// have no vector of their own and are skipped with a warning. With no
/// usable pairs the result is the unit-normalized input.
pub fn attract_repel(
    e: &Embedding,
    synonyms: &[(String, String)],
    antonyms: &[(String, String)],
    cfg: &AttractRepelConfig,
) -> Result<Embedding> {
    cfg.validate()?;
    let syn = resolve_pairs(e, synonyms)?;
    let ant = resolve_pairs(e, antonyms)?;

    let mut out = e.clone();
    out.normalize_all();
    if syn.is_empty() && ant.is_empty() {
        log::warn!("attract_repel called with no usable pairs; returning normalized input");
        return Ok(out);
    }
    for &(l, r) in syn.iter().chain(&ant) {
        for i in [l, r] {
            if out.row(i).iter().all(|v| *v == 0.0) {
                return Err(Error::ZeroNorm(e.words()[i].clone()));
            }
        }
    }

    let initial: Vec<Vec<f64>> = (0..out.len()).map(|i| out.row(i).to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut syn_order = syn.clone();
    let mut ant_order = ant.clone();

    for _ in 0..cfg.epochs {
        syn_order.shuffle(&mut rng);
        ant_order.shuffle(&mut rng);
        let syn_batches: Vec<&[(usize, usize)]> = syn_order.chunks(cfg.syn_batch).collect();
        let ant_batches: Vec<&[(usize, usize)]> = ant_order.chunks(cfg.ant_batch).collect();
        for i in 0..syn_batches.len().max(ant_batches.len()) {
            if let Some(batch) = syn_batches.get(i) {
                process_batch(&mut out, batch, cfg.delta_sim, cfg.lambda, true, &initial);
            }
            if let Some(batch) = ant_batches.get(i) {
                process_batch(&mut out, batch, cfg.delta_ant, cfg.lambda, false, &initial);
            }
        }
        out.normalize_all();
    }
    Ok(out)
}

/// Convenience wrapper: build pairs from the quad per the config's mode.
pub fn attract_repel_quad(
    e: &Embedding,
    quad: &WordSetQuad,
    cfg: &AttractRepelConfig,
) -> Result<Embedding> {
    let (syn, ant) = build_pairs(quad, cfg.mode);
    attract_repel(e, &syn, &ant, cfg)
}

fn resolve_pairs(e: &Embedding, pairs: &[(String, String)]) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(pairs.len());
    for (l, r) in pairs {
        if l.contains(' ') || r.contains(' ') {
            log::warn!("pair ({l}, {r}) has a multi-word entry; skipped");
            continue;
        }
        let li = e
            .index_of(l)
            .ok_or_else(|| Error::OutOfVocabulary(l.clone()))?;
        let ri = e
            .index_of(r)
            .ok_or_else(|| Error::OutOfVocabulary(r.clone()))?;
        out.push((li, ri));
    }
    Ok(out)
}

/// One SGD step on the batch's hinge costs, then the proximal
/// regularization step for every word the batch touches.
fn process_batch(
    out: &mut Embedding,
    batch: &[(usize, usize)],
    margin: f64,
    lambda: f64,
    attract: bool,
    initial: &[Vec<f64>],
) {
    let dim = out.dim();
    let mut batch_words: Vec<usize> = Vec::new();
    for &(l, r) in batch {
        if !batch_words.contains(&l) {
            batch_words.push(l);
        }
        if !batch_words.contains(&r) {
            batch_words.push(r);
        }
    }

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut grads: HashMap<usize, Vec<f64>> = HashMap::new();
    let add = |grads: &mut HashMap<usize, Vec<f64>>, w: usize, v: &[f64], scale: f64| {
        let g = grads.entry(w).or_insert_with(|| vec![0.0; dim]);
        for (gi, vi) in g.iter_mut().zip(v) {
            *gi += scale * vi;
        }
    };

    for &(l, r) in batch {
        // hardest in-batch negative for a word: most similar other word for
        // attract costs, least similar for repel costs
        let negative = |w: usize| -> Option<usize> {
            let wv = out.row(w);
            batch_words
                .iter()
                .copied()
                .filter(|&c| c != l && c != r)
                .map(|c| (c, dot(wv, out.row(c))))
                .reduce(|best, cand| {
                    let better = if attract {
                        cand.1 > best.1
                    } else {
                        cand.1 < best.1
                    };
                    if better {
                        cand
                    } else {
                        best
                    }
                })
                .map(|(c, _)| c)
        };
        let (Some(tl), Some(tr)) = (negative(l), negative(r)) else {
            continue;
        };

        let pair_sim = dot(out.row(l), out.row(r));
        for (anchor, other, neg) in [(l, r, tl), (r, l, tr)] {
            let neg_sim = dot(out.row(anchor), out.row(neg));
            let cost = if attract {
                margin + neg_sim - pair_sim
            } else {
                margin + pair_sim - neg_sim
            };
            if cost > 0.0 {
                if attract {
                    // d/d anchor = t - other, d/d t = anchor, d/d other = -anchor
                    let dir: Vec<f64> = out
                        .row(neg)
                        .iter()
                        .zip(out.row(other))
                        .map(|(n, o)| n - o)
                        .collect();
                    add(&mut grads, anchor, &dir, 1.0);
                    add(&mut grads, neg, out.row(anchor), 1.0);
                    add(&mut grads, other, out.row(anchor), -1.0);
                } else {
                    // d/d anchor = other - t, d/d other = anchor, d/d t = -anchor
                    let dir: Vec<f64> = out
                        .row(other)
                        .iter()
                        .zip(out.row(neg))
                        .map(|(o, n)| o - n)
                        .collect();
                    add(&mut grads, anchor, &dir, 1.0);
                    add(&mut grads, other, out.row(anchor), 1.0);
                    add(&mut grads, neg, out.row(anchor), -1.0);
                }
            }
        }
    }

    for (w, g) in &grads {
        let updated: Vec<f64> = out
            .row(*w)
            .iter()
            .zip(g)
            .map(|(x, gi)| x - SGD_STEP * gi)
            .collect();
        out.set_row(*w, &updated);
    }

    // proximal step of lambda*||x - x_init||^2: exact minimizer of the
    // regularized proximity problem, stable for any lambda
    let shrink = 2.0 * SGD_STEP * lambda;
    for &w in &batch_words {
        let updated: Vec<f64> = out
            .row(w)
            .iter()
            .zip(&initial[w])
            .map(|(x, x0)| (x + shrink * x0) / (1.0 + shrink))
            .collect();
        out.set_row(w, &updated);
    }
}

/// Mean cosine over a pair list; pairs with multi-word entries are skipped.
pub fn mean_pair_cosine(e: &Embedding, pairs: &[(String, String)]) -> Result<f64> {
    let resolved = resolve_pairs(e, pairs)?;
    if resolved.is_empty() {
        return Err(Error::DegenerateInput("no usable pairs".into()));
    }
    let mut sum = 0.0;
    for (l, r) in &resolved {
        sum += e.cosine(&e.words()[*l], &e.words()[*r])?;
    }
    Ok(sum / resolved.len() as f64)
}
