//! Dataset balancing: down-sample stereotypical (or anti-stereotypical)
//! sentences to debias (or over-bias) a training corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wordsets::WordSetQuad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Debias,
    Overbias,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Debias => "debias",
            Mode::Overbias => "overbias",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "debias" => Ok(Mode::Debias),
            "overbias" => Ok(Mode::Overbias),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}' (expected debias or overbias)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BalanceConfig {
    pub mode: Mode,
    /// Keep probability for targeted sentences.
    pub p: f64,
    pub seed: u64,
}

impl BalanceConfig {
    pub fn new(mode: Mode, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "keep probability must be in [0, 1), got {p}"
            )));
        }
        Ok(Self { mode, p, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SentenceClass {
    Stereo,
    Anti,
    Both,
    Neutral,
}

/// True when the tokens contain the entry: single words by membership,
/// multi-word entries as contiguous token runs.
fn contains_entry(tokens: &[String], entry: &str) -> bool {
    if !entry.contains(' ') {
        return tokens.iter().any(|t| t == entry);
    }
    let parts: Vec<&str> = entry.split(' ').collect();
    tokens
        .windows(parts.len())
        .any(|w| w.iter().zip(&parts).all(|(t, p)| t == p))
}

fn contains_any(tokens: &[String], set: &[String]) -> bool {
    set.iter().any(|entry| contains_entry(tokens, entry))
}

/// Classify a lowercased token sequence against the quad: stereotypical when
/// it pairs T1 with A1 or T2 with A2, anti-stereotypical for the crossed
/// pairings, `Both` when both patterns occur, `Neutral` otherwise.
pub fn classify_sentence(tokens: &[String], quad: &WordSetQuad) -> SentenceClass {
    let t1 = contains_any(tokens, &quad.t1);
    let t2 = contains_any(tokens, &quad.t2);
    let a1 = contains_any(tokens, &quad.a1);
    let a2 = contains_any(tokens, &quad.a2);
    let stereo = (t1 && a1) || (t2 && a2);
    let anti = (t1 && a2) || (t2 && a1);
    match (stereo, anti) {
        (true, true) => SentenceClass::Both,
        (true, false) => SentenceClass::Stereo,
        (false, true) => SentenceClass::Anti,
        (false, false) => SentenceClass::Neutral,
    }
}

/// Keep each targeted sentence with probability `p`; everything else is
/// retained, preserving order. Sentences classified `Both` are targeted in
/// either mode.
pub fn balance_corpus(
    sentences: &[Vec<String>],
    quad: &WordSetQuad,
    cfg: &BalanceConfig,
) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let targeted = match cfg.mode {
        Mode::Debias => SentenceClass::Stereo,
        Mode::Overbias => SentenceClass::Anti,
    };
    sentences
        .iter()
        .filter(|tokens| {
            let class = classify_sentence(tokens, quad);
            if class == targeted || class == SentenceClass::Both {
                rng.gen_range(0.0..1.0) < cfg.p
            } else {
                true
            }
        })
        .cloned()
        .collect()
}
