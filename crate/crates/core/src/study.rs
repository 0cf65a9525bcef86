//! End-to-end correlation study: measure intrinsic and extrinsic bias across
//! embedding variants, assemble the run table, and correlate.

use std::collections::BTreeMap;

use crate::attract_repel::AttractRepelConfig;
use crate::corpus::LabeledCorpus;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::rnsb::{rnsb, DEFAULT_REGULARIZATION};
use crate::runtable::RunTable;
use crate::scoring::{bias_score, predict_records, train_standin_classifier, Measure};
use crate::seed::derive_seed;
use crate::synth::{make_biased_corpus, make_biased_embedding, SyntheticSpec, GROUP_1, GROUP_2};
use crate::variants::{attract_repel_grid, VariantPayload, DEFAULT_AR_DELTAS, DEFAULT_AR_LAMBDAS};
use crate::weat::weat;
use crate::wordsets::WordSetQuad;

pub const COL_WEAT: &str = "weat_effect_size";
pub const COL_WEAT_MISMATCHED: &str = "weat_effect_size_mismatched";
pub const COL_RNSB_SIGNED: &str = "rnsb_signed";
pub const COL_RNSB_KL: &str = "rnsb_kl";
pub const COL_PRECISION_DIFF: &str = "precision_diff";
pub const COL_RECALL_DIFF: &str = "recall_diff";
pub const COL_F1_DIFF: &str = "f1_diff";

pub fn intrinsic_columns() -> Vec<String> {
    [COL_WEAT, COL_RNSB_SIGNED, COL_RNSB_KL]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

pub fn extrinsic_columns() -> Vec<String> {
    [COL_PRECISION_DIFF, COL_RECALL_DIFF, COL_F1_DIFF]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// How one variant is measured.
#[derive(Debug, Clone)]
pub struct MeasureConfig {
    /// Group tags compared by the extrinsic scores (a minus b).
    pub group_a: String,
    pub group_b: String,
    pub regularization: f64,
    pub rnsb_seeds: Vec<u64>,
    /// Stand-in classifier train seeds; extrinsic scores are averaged.
    pub classifier_seeds: Vec<u64>,
}

impl MeasureConfig {
    pub fn synthetic(master_seed: u64) -> Self {
        Self {
            group_a: GROUP_1.to_string(),
            group_b: GROUP_2.to_string(),
            regularization: DEFAULT_REGULARIZATION,
            rnsb_seeds: (0..10)
                .map(|i| derive_seed(master_seed, &format!("rnsb-{i}")))
                .collect(),
            classifier_seeds: (0..3)
                .map(|i| derive_seed(master_seed, &format!("standin-{i}")))
                .collect(),
        }
    }
}

/// Measure every metric column for one embedding variant. Degenerate metric
/// values become missing cells rather than failures.
pub fn measure_variant(
    e: &Embedding,
    quad: &WordSetQuad,
    mismatched_quad: Option<&WordSetQuad>,
    train: &LabeledCorpus,
    eval: &LabeledCorpus,
    cfg: &MeasureConfig,
) -> Result<BTreeMap<String, f64>> {
    let mut row = BTreeMap::new();

    match weat(e, quad) {
        Ok(r) => {
            row.insert(COL_WEAT.to_string(), r.effect_size);
        }
        Err(Error::DegenerateInput(_)) => {}
        Err(e) => return Err(e),
    }
    if let Some(mq) = mismatched_quad {
        match weat(e, mq) {
            Ok(r) => {
                row.insert(COL_WEAT_MISMATCHED.to_string(), r.effect_size);
            }
            Err(Error::DegenerateInput(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let r = rnsb(
        e,
        &[quad.t1.clone(), quad.t2.clone()],
        &quad.a1,
        &quad.a2,
        cfg.regularization,
        &cfg.rnsb_seeds,
    )?;
    row.insert(COL_RNSB_KL.to_string(), r.kl_value);
    if let Some(signed) = r.signed_value {
        row.insert(COL_RNSB_SIGNED.to_string(), signed);
    }

    let mut sums = [0.0; 3];
    for &seed in &cfg.classifier_seeds {
        let clf = train_standin_classifier(train, e, cfg.regularization, seed)?;
        let records = predict_records(&clf, eval, e)?;
        for (i, measure) in [Measure::Precision, Measure::Recall, Measure::F1]
            .into_iter()
            .enumerate()
        {
            sums[i] += bias_score(&records, &cfg.group_a, &cfg.group_b, measure, true)?;
        }
    }
    let n = cfg.classifier_seeds.len() as f64;
    row.insert(COL_PRECISION_DIFF.to_string(), sums[0] / n);
    row.insert(COL_RECALL_DIFF.to_string(), sums[1] / n);
    row.insert(COL_F1_DIFF.to_string(), sums[2] / n);
    Ok(row)
}

#[derive(Debug, Clone)]
pub struct SynthStudyConfig {
    pub beta_grid: Vec<f64>,
    pub dim: usize,
    pub noise_scale: f64,
    pub docs_per_group: usize,
    pub master_seed: u64,
}

impl Default for SynthStudyConfig {
    fn default() -> Self {
        Self {
            beta_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            dim: 10,
            noise_scale: 0.05,
            docs_per_group: 300,
            master_seed: 0,
        }
    }
}

/// A mismatched quad built from filler words: same shape, no relation to the
/// planted bias.
pub fn mismatched_quad(spec: &SyntheticSpec) -> Result<WordSetQuad> {
    let per_set = 8.min(spec.filler_size / 4);
    if per_set < 2 {
        return Err(Error::InvalidParameter(
            "need at least 8 filler words for a mismatched quad".into(),
        ));
    }
    let set = |offset: usize| -> Vec<String> {
        (0..per_set)
            .map(|i| format!("fillw{}", offset + i))
            .collect()
    };
    WordSetQuad::new(set(0), set(per_set), set(2 * per_set), set(3 * per_set))
}

/// Run the full synthetic study: one row per beta grid point, measured with
/// both the matched and the mismatched word sets.
pub fn run_synth_study(cfg: &SynthStudyConfig) -> Result<RunTable> {
    let mut columns = intrinsic_columns();
    columns.push(COL_WEAT_MISMATCHED.to_string());
    columns.extend(extrinsic_columns());
    let mut table = RunTable::new(columns);

    let measure_cfg = MeasureConfig::synthetic(cfg.master_seed);
    for &beta in &cfg.beta_grid {
        let spec = SyntheticSpec {
            dim: cfg.dim,
            noise_scale: cfg.noise_scale,
            ..SyntheticSpec::new(beta, cfg.master_seed)
        };
        let (e, quad) = make_biased_embedding(&spec)?;
        let mq = mismatched_quad(&spec)?;
        let train = make_biased_corpus(
            &SyntheticSpec {
                seed: derive_seed(cfg.master_seed, "train-corpus"),
                ..spec.clone()
            },
            cfg.docs_per_group,
        )?;
        let eval = make_biased_corpus(
            &SyntheticSpec {
                seed: derive_seed(cfg.master_seed, "eval-corpus"),
                ..spec.clone()
            },
            cfg.docs_per_group,
        )?;
        let row = measure_variant(&e, &quad, Some(&mq), &train, &eval, &measure_cfg)?;
        table.push_row(&format!("synth-b{beta:.1}"), &row)?;
    }
    Ok(table)
}

/// Run a study over the original embedding plus its attract-repel grid,
/// measuring against fixed train/eval corpora.
#[allow(clippy::too_many_arguments)]
pub fn run_attract_repel_study(
    e: &Embedding,
    quad: &WordSetQuad,
    train: &LabeledCorpus,
    eval: &LabeledCorpus,
    base: &AttractRepelConfig,
    measure_cfg: &MeasureConfig,
    master_seed: u64,
) -> Result<RunTable> {
    let mut columns = intrinsic_columns();
    columns.extend(extrinsic_columns());
    let mut table = RunTable::new(columns);

    let row = measure_variant(e, quad, None, train, eval, measure_cfg)?;
    table.push_row("original", &row)?;

    let grid = attract_repel_grid(
        e,
        quad,
        &DEFAULT_AR_DELTAS,
        &DEFAULT_AR_DELTAS,
        &DEFAULT_AR_LAMBDAS,
        base,
        master_seed,
    )?;
    for variant in &grid {
        let VariantPayload::Embedding(modified) = &variant.payload else {
            continue;
        };
        let row = measure_variant(modified, quad, None, train, eval, measure_cfg)?;
        table.push_row(&variant.id, &row)?;
    }
    Ok(table)
}
