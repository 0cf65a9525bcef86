//! Synthetic embeddings and corpora with planted, tunable bias.
//!
//! The generator gives the rest of the toolkit a falsifiable desk-scale
//! substrate: a bias knob `beta` in [0, 1] controls both the embedding
//! geometry and the corpus statistics.
//!
//! Embedding: attribute words sit in small clusters around two orthogonal
//! axes (A1 near the first, A2 mirrored near the second). Target words start
//! on the diagonal between them (beta = 0, where T1 and T2 coincide and all
//! metrics are exactly symmetric) and rotate toward their stereotypical
//! attribute axis as beta grows, saturating the WEAT effect size at
//! beta = 1. Isotropic Gaussian noise plus renormalization is applied per
//! word; the noise stream is seeded from (seed, beta), so embeddings at
//! different grid points are independently noisy.
//!
//! Corpus: every document carries a group (G1/G2) and a hate label with
//! per-group label balance. Attribute tokens are label-exclusive (A1 words
//! appear only in HS documents), which makes them recoverable by PMI
//! extraction; target tokens mark the group, with purity `(1 + beta) / 2`,
//! so group and token distribution decouple exactly at beta = 0. A quarter
//! of the documents carry no attribute token at all, which keeps the
//! stand-in classifier imperfect enough to expose grouped bias.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::{HateLabel, LabeledCorpus, LabeledDocument};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::wordsets::WordSetQuad;

/// Spread of target base angles around the diagonal, radians.
const TARGET_SPREAD: f64 = 0.35;
/// Spread of attribute cluster angles around their axis, radians.
const ATTRIBUTE_SPREAD: f64 = 0.15;
/// Target tokens per synthetic document.
const TARGET_TOKENS_PER_DOC: usize = 4;
/// Filler tokens per synthetic document.
const FILLER_TOKENS_PER_DOC: usize = 4;

pub const GROUP_1: &str = "G1";
pub const GROUP_2: &str = "G2";

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    /// Bias strength in [0, 1].
    pub bias_strength: f64,
    pub dim: usize,
    pub t1_size: usize,
    pub t2_size: usize,
    pub a1_size: usize,
    pub a2_size: usize,
    pub filler_size: usize,
    pub noise_scale: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The default layout: dimension 10, eight words per set, 64 filler
    /// words, noise 0.05.
    pub fn new(bias_strength: f64, seed: u64) -> Self {
        Self {
            bias_strength,
            dim: 10,
            t1_size: 8,
            t2_size: 8,
            a1_size: 8,
            a2_size: 8,
            filler_size: 64,
            noise_scale: 0.05,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.bias_strength) {
            return Err(Error::InvalidParameter(format!(
                "bias strength must be in [0, 1], got {}",
                self.bias_strength
            )));
        }
        if self.dim < 4 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 4".into(),
            ));
        }
        if [self.t1_size, self.t2_size, self.a1_size, self.a2_size].contains(&0) {
            return Err(Error::InvalidParameter(
                "word set sizes must be positive".into(),
            ));
        }
        if self.noise_scale < 0.0 || !self.noise_scale.is_finite() {
            return Err(Error::InvalidParameter("noise scale must be >= 0".into()));
        }
        Ok(())
    }

    fn rng(&self, stage: &str) -> ChaCha8Rng {
        let tag = format!("synth-{stage}-{:016x}", self.bias_strength.to_bits());
        ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &tag))
    }
}

fn set_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Symmetric offsets in [-spread, spread]; a single element sits at 0.
fn spread_offsets(n: usize, spread: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| spread * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect()
}

fn planar_vector(angle: f64, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = angle.cos();
    v[1] = angle.sin();
    v
}

/// Swap the two planar coordinates: exact mirror across the diagonal.
fn mirrored(v: &[f64]) -> Vec<f64> {
    let mut m = v.to_vec();
    m.swap(0, 1);
    m
}

fn add_noise_and_normalize(v: &mut [f64], scale: f64, rng: &mut ChaCha8Rng) {
    if scale > 0.0 {
        for x in v.iter_mut() {
            let g: f64 = StandardNormal.sample(rng);
            *x += scale * g;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Build the planted-bias embedding and its matching word-set quad.
pub fn make_biased_embedding(spec: &SyntheticSpec) -> Result<(Embedding, WordSetQuad)> {
    spec.validate()?;
    let beta = spec.bias_strength;
    let mut rng = spec.rng("embedding");

    let t1_names = set_names("t1w", spec.t1_size);
    let t2_names = set_names("t2w", spec.t2_size);
    let a1_names = set_names("a1w", spec.a1_size);
    let a2_names = set_names("a2w", spec.a2_size);

    let mut words = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();

    // targets: interpolate from the shared diagonal position toward their
    // attribute axis (T1 -> angle 0, T2 -> angle pi/2)
    let diagonal = std::f64::consts::FRAC_PI_4;
    let quarter = std::f64::consts::FRAC_PI_2;
    for (names, toward) in [(&t1_names, 0.0), (&t2_names, quarter)] {
        let offsets = spread_offsets(names.len(), TARGET_SPREAD);
        for (name, offset) in names.iter().zip(&offsets) {
            let angle = (1.0 - beta) * (diagonal + offset) + beta * toward;
            words.push(name.clone());
            vectors.push(planar_vector(angle, spec.dim));
        }
    }

    // attribute clusters: A1 around angle 0, A2 its exact mirror
    let a1_offsets = spread_offsets(spec.a1_size, ATTRIBUTE_SPREAD);
    for (name, offset) in a1_names.iter().zip(&a1_offsets) {
        words.push(name.clone());
        vectors.push(planar_vector(*offset, spec.dim));
    }
    let a2_offsets = spread_offsets(spec.a2_size, ATTRIBUTE_SPREAD);
    for (name, offset) in a2_names.iter().zip(&a2_offsets) {
        words.push(name.clone());
        vectors.push(mirrored(&planar_vector(*offset, spec.dim)));
    }

    // filler: random unit vectors across the full space
    for i in 0..spec.filler_size {
        let mut v: Vec<f64> = (0..spec.dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        words.push(format!("fillw{i}"));
        vectors.push(v);
    }

    for v in vectors
        .iter_mut()
        .take(spec.t1_size + spec.t2_size + spec.a1_size + spec.a2_size)
    {
        add_noise_and_normalize(v, spec.noise_scale, &mut rng);
    }

    let embedding = Embedding::new(words, vectors, spec.dim)?;
    let quad = WordSetQuad::new(t1_names, t2_names, a1_names, a2_names)?;
    Ok((embedding, quad))
}

/// Build a labeled corpus whose group-conditional target-token distributions
/// skew with beta. `docs_per_group` documents per group, split exactly in
/// half between HS and NON_HS.
pub fn make_biased_corpus(spec: &SyntheticSpec, docs_per_group: usize) -> Result<LabeledCorpus> {
    spec.validate()?;
    if docs_per_group < 10 {
        return Err(Error::InvalidParameter(
            "docs_per_group must be at least 10".into(),
        ));
    }
    let beta = spec.bias_strength;
    let mut rng = spec.rng("corpus");

    let t1_names = set_names("t1w", spec.t1_size);
    let t2_names = set_names("t2w", spec.t2_size);
    let a1_names = set_names("a1w", spec.a1_size);
    let a2_names = set_names("a2w", spec.a2_size);
    let filler: Vec<String> = (0..spec.filler_size.max(1))
        .map(|i| format!("fillw{i}"))
        .collect();

    let mut documents = Vec::with_capacity(docs_per_group * 2);
    for i in 0..docs_per_group {
        for group in [GROUP_1, GROUP_2] {
            let hate = if i % 2 == 0 {
                HateLabel::Hs
            } else {
                HateLabel::NonHs
            };
            let own_purity = (1.0 + beta) / 2.0;
            let (own, other) = if group == GROUP_1 {
                (&t1_names, &t2_names)
            } else {
                (&t2_names, &t1_names)
            };
            let mut tokens = Vec::new();
            for _ in 0..TARGET_TOKENS_PER_DOC {
                let set = if rng.gen_range(0.0..1.0) < own_purity {
                    own
                } else {
                    other
                };
                tokens.push(set[rng.gen_range(0..set.len())].clone());
            }
            // a quarter of documents carry no label-bearing token
            let attr_count = match rng.gen_range(0.0..1.0) {
                u if u < 0.25 => 0,
                u if u < 0.50 => 1,
                _ => 2,
            };
            let attrs = if hate == HateLabel::Hs {
                &a1_names
            } else {
                &a2_names
            };
            for _ in 0..attr_count {
                tokens.push(attrs[rng.gen_range(0..attrs.len())].clone());
            }
            for _ in 0..FILLER_TOKENS_PER_DOC {
                tokens.push(filler[rng.gen_range(0..filler.len())].clone());
            }
            documents.push(LabeledDocument {
                tokens,
                hate_label: hate,
                group_label: group.to_string(),
            });
        }
    }
    LabeledCorpus::new(documents)
}
