//! Parameter-grid enumeration of bias-modified embedding and corpus variants.

use serde::Serialize;
use serde_json::json;

use crate::attract_repel::{attract_repel_quad, AttractRepelConfig};
use crate::balance::{balance_corpus, BalanceConfig, Mode};
use crate::embedding::Embedding;
use crate::error::Result;
use crate::seed::derive_seed;
use crate::wordsets::WordSetQuad;

/// Keep probabilities used for the balancing grid.
pub const DEFAULT_BALANCE_PS: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Margin values used for the specialization grid.
pub const DEFAULT_AR_DELTAS: [f64; 2] = [0.0, 1.0];
/// Regularization values used for the specialization grid.
pub const DEFAULT_AR_LAMBDAS: [f64; 3] = [1e-1, 5e-2, 1e-2];

pub enum VariantPayload {
    Embedding(Embedding),
    Corpus(Vec<Vec<String>>),
}

pub struct Variant {
    pub id: String,
    pub payload: VariantPayload,
    pub params: serde_json::Value,
}

impl Variant {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            VariantPayload::Embedding(_) => "embedding",
            VariantPayload::Corpus(_) => "corpus",
        }
    }
}

/// Manifest row describing one emitted variant.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: String,
    pub params: serde_json::Value,
    pub output_path: String,
}

/// Down-sampled corpus variants over both modes and the given keep
/// probabilities; each variant's RNG seed is derived from its id.
pub fn balance_grid(
    sentences: &[Vec<String>],
    quad: &WordSetQuad,
    p_values: &[f64],
    master_seed: u64,
) -> Result<Vec<Variant>> {
    let mut variants = Vec::new();
    for mode in [Mode::Debias, Mode::Overbias] {
        for &p in p_values {
            let id = format!("bal-{mode}-p{p:.1}");
            let cfg = BalanceConfig::new(mode, p, derive_seed(master_seed, &id))?;
            let kept = balance_corpus(sentences, quad, &cfg);
            variants.push(Variant {
                id: id.clone(),
                payload: VariantPayload::Corpus(kept),
                params: json!({"mode": mode.to_string(), "p": p, "seed": cfg.seed}),
            });
        }
    }
    Ok(variants)
}

/// Specialized embedding variants over both modes and the margin and
/// regularization grids.
pub fn attract_repel_grid(
    e: &Embedding,
    quad: &WordSetQuad,
    deltas_sim: &[f64],
    deltas_ant: &[f64],
    lambdas: &[f64],
    base: &AttractRepelConfig,
    master_seed: u64,
) -> Result<Vec<Variant>> {
    let mut variants = Vec::new();
    for mode in [Mode::Debias, Mode::Overbias] {
        for &delta_sim in deltas_sim {
            for &delta_ant in deltas_ant {
                for &lambda in lambdas {
                    let id = format!("ar-{mode}-dsim{delta_sim}-dant{delta_ant}-lam{lambda}");
                    let cfg = AttractRepelConfig {
                        delta_sim,
                        delta_ant,
                        lambda,
                        mode,
                        seed: derive_seed(master_seed, &id),
                        ..*base
                    };
                    let modified = attract_repel_quad(e, quad, &cfg)?;
                    variants.push(Variant {
                        id: id.clone(),
                        payload: VariantPayload::Embedding(modified),
                        params: serde_json::to_value(cfg)?,
                    });
                }
            }
        }
    }
    Ok(variants)
}
