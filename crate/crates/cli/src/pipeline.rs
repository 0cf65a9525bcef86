//! One-shot correlation-study driver.
//!
//! A JSON config selects either the synthetic bench (a beta grid of planted
//! embeddings and corpora) or file inputs (an embedding modified across the
//! attract/repel grid, measured against fixed corpora). The run emits the
//! run table, the correlation grid, per-pair scatter data, the variant
//! artifacts and a manifest into the output directory.

use std::path::PathBuf;

use anyhow::{anyhow, Context};
use serde::Deserialize;
use serde_json::json;

use embias_core::attract_repel::AttractRepelConfig;
use embias_core::correlation::{
    correlate_table, emit_scatter, write_correlation_csv, write_scatter_csv,
};
use embias_core::embedding::save_embedding;
use embias_core::seed::derive_seed;
use embias_core::study::{self, MeasureConfig, SynthStudyConfig};
use embias_core::synth::{make_biased_corpus, make_biased_embedding, SyntheticSpec};
use embias_core::variants::{
    attract_repel_grid, balance_grid, ManifestEntry, VariantPayload, DEFAULT_AR_DELTAS,
    DEFAULT_AR_LAMBDAS, DEFAULT_BALANCE_PS,
};
use embias_core::RunTable;

use crate::io;
use crate::{CliError, CliResult, PipelineArgs};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineConfig {
    output_dir: PathBuf,
    master_seed: u64,
    #[serde(default = "default_resamples")]
    resamples: usize,
    #[serde(default)]
    synth: Option<SynthSection>,
    #[serde(default)]
    files: Option<FilesSection>,
}

fn default_resamples() -> usize {
    embias_core::correlation::DEFAULT_RESAMPLES
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthSection {
    #[serde(default = "default_beta_grid")]
    beta_grid: Vec<f64>,
    #[serde(default = "default_dim")]
    dim: usize,
    #[serde(default = "default_noise")]
    noise_scale: f64,
    #[serde(default = "default_docs")]
    docs_per_group: usize,
}

fn default_beta_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}
fn default_dim() -> usize {
    10
}
fn default_noise() -> f64 {
    0.05
}
fn default_docs() -> usize {
    300
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilesSection {
    embedding: PathBuf,
    wordsets: PathBuf,
    train_corpus: PathBuf,
    eval_corpus: PathBuf,
    group_a: String,
    group_b: String,
    #[serde(default = "default_epochs")]
    epochs: usize,
    /// Optional sentence-per-line corpus; when present the 20-variant
    /// balancing grid is emitted alongside the embedding variants.
    #[serde(default)]
    balance_corpus: Option<PathBuf>,
}

fn default_epochs() -> usize {
    50
}

pub fn run(args: PipelineArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))
        .map_err(CliError::validation)?;
    let config: PipelineConfig = serde_json::from_str(&text)
        .context("parsing pipeline config")
        .map_err(CliError::validation)?;

    match (&config.synth, &config.files) {
        (Some(_), Some(_)) | (None, None) => Err(CliError::validation(anyhow!(
            "config must set exactly one of 'synth' or 'files'"
        ))),
        (Some(synth), None) => run_synth(&config, synth),
        (None, Some(files)) => run_files(&config, files),
    }
}

fn run_synth(config: &PipelineConfig, synth: &SynthSection) -> CliResult {
    let study_cfg = SynthStudyConfig {
        beta_grid: synth.beta_grid.clone(),
        dim: synth.dim,
        noise_scale: synth.noise_scale,
        docs_per_group: synth.docs_per_group,
        master_seed: config.master_seed,
    };
    let table = study::run_synth_study(&study_cfg).map_err(CliError::validation)?;

    // emit the per-variant artifacts the table was measured on
    let dir = &config.output_dir;
    let mut manifest = Vec::new();
    for &beta in &synth.beta_grid {
        let spec = SyntheticSpec {
            dim: synth.dim,
            noise_scale: synth.noise_scale,
            ..SyntheticSpec::new(beta, config.master_seed)
        };
        let (e, quad) = make_biased_embedding(&spec).map_err(CliError::validation)?;
        let id = format!("synth-b{beta:.1}");
        let path = dir.join("variants").join(format!("{id}.txt"));
        io::write_atomic(&path, |w| {
            save_embedding(&e, w)?;
            Ok(())
        })?;
        manifest.push(ManifestEntry {
            id: id.clone(),
            kind: "embedding".into(),
            params: json!({"beta": beta, "dim": synth.dim, "noise_scale": synth.noise_scale}),
            output_path: path.display().to_string(),
        });
        if beta == synth.beta_grid[0] {
            io::write_atomic(&dir.join("wordsets.json"), |w| {
                quad.to_json_writer(w)?;
                Ok(())
            })?;
        }
        for (stage, tag) in [("train", "train-corpus"), ("eval", "eval-corpus")] {
            let corpus = make_biased_corpus(
                &SyntheticSpec {
                    seed: derive_seed(config.master_seed, tag),
                    ..spec.clone()
                },
                synth.docs_per_group,
            )
            .map_err(CliError::validation)?;
            let cpath = dir.join("variants").join(format!("{id}-{stage}.jsonl"));
            io::write_atomic(&cpath, |w| {
                corpus.to_jsonl_writer(w)?;
                Ok(())
            })?;
            manifest.push(ManifestEntry {
                id: format!("{id}-{stage}"),
                kind: "corpus".into(),
                params: json!({"beta": beta, "stage": stage, "docs_per_group": synth.docs_per_group}),
                output_path: cpath.display().to_string(),
            });
        }
    }

    let mut intrinsic = study::intrinsic_columns();
    intrinsic.push(study::COL_WEAT_MISMATCHED.to_string());
    emit_study_outputs(
        config,
        &table,
        &intrinsic,
        &study::extrinsic_columns(),
        manifest,
    )
}

fn run_files(config: &PipelineConfig, files: &FilesSection) -> CliResult {
    let e = io::load_embedding(&files.embedding)?;
    let quad = io::load_quad(&files.wordsets)?;
    let train = io::load_corpus(&files.train_corpus)?;
    let eval = io::load_corpus(&files.eval_corpus)?;

    let base = AttractRepelConfig {
        epochs: files.epochs,
        ..AttractRepelConfig::default()
    };
    let measure_cfg = MeasureConfig {
        group_a: files.group_a.clone(),
        group_b: files.group_b.clone(),
        ..MeasureConfig::synthetic(config.master_seed)
    };
    let table = study::run_attract_repel_study(
        &e,
        &quad,
        &train,
        &eval,
        &base,
        &measure_cfg,
        config.master_seed,
    )
    .map_err(CliError::validation)?;

    let dir = &config.output_dir;
    let mut manifest = Vec::new();
    let grid = attract_repel_grid(
        &e,
        &quad,
        &DEFAULT_AR_DELTAS,
        &DEFAULT_AR_DELTAS,
        &DEFAULT_AR_LAMBDAS,
        &base,
        config.master_seed,
    )
    .map_err(CliError::validation)?;
    for variant in &grid {
        let VariantPayload::Embedding(modified) = &variant.payload else {
            continue;
        };
        let path = dir.join("variants").join(format!("{}.txt", variant.id));
        io::write_atomic(&path, |w| {
            save_embedding(modified, w)?;
            Ok(())
        })?;
        manifest.push(ManifestEntry {
            id: variant.id.clone(),
            kind: variant.kind().to_string(),
            params: variant.params.clone(),
            output_path: path.display().to_string(),
        });
    }

    if let Some(balance_path) = &files.balance_corpus {
        let sentences = io::load_sentences(balance_path)?;
        let variants = balance_grid(&sentences, &quad, &DEFAULT_BALANCE_PS, config.master_seed)
            .map_err(CliError::validation)?;
        for variant in &variants {
            let VariantPayload::Corpus(kept) = &variant.payload else {
                continue;
            };
            let path = dir.join("variants").join(format!("{}.txt", variant.id));
            io::write_atomic(&path, |w| {
                for tokens in kept {
                    writeln!(w, "{}", tokens.join(" "))?;
                }
                Ok(())
            })?;
            manifest.push(ManifestEntry {
                id: variant.id.clone(),
                kind: variant.kind().to_string(),
                params: variant.params.clone(),
                output_path: path.display().to_string(),
            });
        }
    }

    emit_study_outputs(
        config,
        &table,
        &study::intrinsic_columns(),
        &study::extrinsic_columns(),
        manifest,
    )
}

fn emit_study_outputs(
    config: &PipelineConfig,
    table: &RunTable,
    intrinsic: &[String],
    extrinsic: &[String],
    manifest: Vec<ManifestEntry>,
) -> CliResult {
    let dir = &config.output_dir;
    io::write_atomic(&dir.join("runtable.csv"), |w| {
        table.to_csv_writer(w)?;
        Ok(())
    })?;

    let cells = correlate_table(
        table,
        intrinsic,
        extrinsic,
        config.resamples,
        config.master_seed,
    )
    .map_err(CliError::validation)?;
    io::write_atomic(&dir.join("correlations.csv"), |w| {
        write_correlation_csv(&cells, w)?;
        Ok(())
    })?;

    for icol in intrinsic {
        for ecol in extrinsic {
            let rows = emit_scatter(table, icol, ecol).map_err(CliError::validation)?;
            let path = dir.join("scatter").join(format!("{icol}__{ecol}.csv"));
            io::write_atomic(&path, |w| {
                write_scatter_csv(&rows, icol, ecol, w)?;
                Ok(())
            })?;
        }
    }

    io::write_atomic(&dir.join("manifest.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        writeln!(w)?;
        Ok(())
    })?;
    eprintln!(
        "pipeline complete: {} variants, {} correlation cells -> {}",
        table.rows.len(),
        cells.len(),
        dir.display()
    );
    Ok(())
}
