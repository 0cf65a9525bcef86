//! Subcommand implementations; the heavy lifting lives in embias-core.

use anyhow::{anyhow, Context};
use serde_json::json;

use embias_core::attract_repel::{attract_repel_quad, AttractRepelConfig};
use embias_core::balance::{balance_corpus, BalanceConfig};
use embias_core::corpus::Axis;
use embias_core::correlation::{
    correlate_table, emit_scatter, write_correlation_csv, write_scatter_csv,
};
use embias_core::embedding::{prune_weat_targets, save_embedding};
use embias_core::extraction::{apply_curation, extract_candidates, write_candidates_csv};
use embias_core::scoring::{
    grouped_prf, predict_records, read_predictions_csv, train_standin_classifier,
    write_predictions_csv, Measure, PredictionRecord,
};
use embias_core::synth::{make_biased_corpus, make_biased_embedding, SyntheticSpec};
use embias_core::variants::{
    attract_repel_grid, balance_grid, ManifestEntry, VariantPayload, DEFAULT_AR_DELTAS,
    DEFAULT_AR_LAMBDAS, DEFAULT_BALANCE_PS,
};
use embias_core::{expand_word_sets, RunTable};

use crate::io;
use crate::{CliError, CliResult};
use std::io::Write;
use std::path::Path;

pub fn weat(args: crate::WeatArgs) -> CliResult {
    let e = io::load_embedding(&args.embedding)?;
    let mut quad = io::load_quad(&args.wordsets)?;
    if let Some(seed) = args.prune_seed {
        quad = prune_weat_targets(&quad, &e, seed).map_err(CliError::validation)?;
    }
    let result = embias_core::weat::weat(&e, &quad).map_err(CliError::validation)?;
    io::print_json(&result)
}

pub fn rnsb(args: crate::RnsbArgs) -> CliResult {
    let e = io::load_embedding(&args.embedding)?;
    let mut quad = io::load_quad(&args.wordsets)?;
    if let Some(seed) = args.prune_seed {
        quad = prune_weat_targets(&quad, &e, seed).map_err(CliError::validation)?;
    }
    let seeds = args.seeds.unwrap_or_else(embias_core::rnsb::default_seeds);
    let result = embias_core::rnsb::rnsb(
        &e,
        &[quad.t1.clone(), quad.t2.clone()],
        &quad.a1,
        &quad.a2,
        args.reg,
        &seeds,
    )
    .map_err(CliError::validation)?;
    io::print_json(&result)
}

pub fn extract_words(args: crate::ExtractArgs) -> CliResult {
    let corpus = io::load_corpus(&args.corpus)?;
    let axis: Axis = args.axis.parse().map_err(CliError::validation)?;
    let candidates = extract_candidates(
        &corpus,
        axis,
        &args.label,
        args.top_n,
        args.min_docs,
        args.alpha,
    )
    .map_err(CliError::validation)?;

    if let Some(final_n) = args.final_n {
        let exclude = match &args.exclude {
            Some(path) => io::load_word_list(path)?,
            None => Vec::new(),
        };
        let include = match &args.include {
            Some(path) => io::load_word_list(path)?,
            None => Vec::new(),
        };
        let words = apply_curation(&candidates, &exclude, &include, final_n)
            .map_err(CliError::validation)?;
        io::write_output(args.output.as_deref(), |w| {
            for word in &words {
                writeln!(w, "{word}")?;
            }
            Ok(())
        })
    } else {
        io::write_output(args.output.as_deref(), |w| {
            write_candidates_csv(&candidates, w)?;
            Ok(())
        })
    }
}

pub fn expand_wordset(args: crate::ExpandArgs) -> CliResult {
    let quad = io::load_quad(&args.wordsets)?;
    let aux = io::load_embedding(&args.aux)?;
    let expanded = expand_word_sets(&quad, &aux, args.k).map_err(CliError::validation)?;
    io::write_atomic(&args.output, |w| {
        expanded.to_json_writer(w)?;
        Ok(())
    })
}

fn write_sentences(w: &mut dyn Write, sentences: &[Vec<String>]) -> anyhow::Result<()> {
    for tokens in sentences {
        writeln!(w, "{}", tokens.join(" "))?;
    }
    Ok(())
}

pub fn balance(args: crate::BalanceArgs) -> CliResult {
    let sentences = io::load_sentences(&args.corpus)?;
    let quad = io::load_quad(&args.wordsets)?;
    if args.grid {
        let dir = args
            .output_dir
            .as_deref()
            .expect("clap enforces output_dir");
        let variants = balance_grid(&sentences, &quad, &DEFAULT_BALANCE_PS, args.seed)
            .map_err(CliError::validation)?;
        let mut manifest = Vec::new();
        for variant in &variants {
            let VariantPayload::Corpus(kept) = &variant.payload else {
                continue;
            };
            let path = dir.join(format!("{}.txt", variant.id));
            io::write_atomic(&path, |w| write_sentences(w, kept))?;
            manifest.push(ManifestEntry {
                id: variant.id.clone(),
                kind: variant.kind().to_string(),
                params: variant.params.clone(),
                output_path: path.display().to_string(),
            });
        }
        write_manifest(dir, &manifest)
    } else {
        let mode = args.mode.parse().map_err(CliError::validation)?;
        let cfg = BalanceConfig::new(mode, args.p, args.seed).map_err(CliError::validation)?;
        let kept = balance_corpus(&sentences, &quad, &cfg);
        io::write_output(args.output.as_deref(), |w| write_sentences(w, &kept))
    }
}

pub fn attract_repel(args: crate::AttractRepelArgs) -> CliResult {
    let e = io::load_embedding(&args.embedding)?;
    let quad = io::load_quad(&args.wordsets)?;
    let mode = args.mode.parse().map_err(CliError::validation)?;
    let base = AttractRepelConfig {
        delta_sim: args.delta_sim,
        delta_ant: args.delta_ant,
        lambda: args.lambda,
        syn_batch: args.syn_batch,
        ant_batch: args.ant_batch,
        epochs: args.epochs,
        mode,
        seed: args.seed,
    };
    if args.grid {
        let dir = args
            .output_dir
            .as_deref()
            .expect("clap enforces output_dir");
        let variants = attract_repel_grid(
            &e,
            &quad,
            &DEFAULT_AR_DELTAS,
            &DEFAULT_AR_DELTAS,
            &DEFAULT_AR_LAMBDAS,
            &base,
            args.seed,
        )
        .map_err(CliError::validation)?;
        let mut manifest = Vec::new();
        for variant in &variants {
            let VariantPayload::Embedding(modified) = &variant.payload else {
                continue;
            };
            let path = dir.join(format!("{}.txt", variant.id));
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
        write_manifest(dir, &manifest)
    } else {
        let modified = attract_repel_quad(&e, &quad, &base).map_err(CliError::validation)?;
        let output = args
            .output
            .as_deref()
            .ok_or_else(|| CliError::validation(anyhow!("--output is required without --grid")))?;
        io::write_atomic(output, |w| {
            save_embedding(&modified, w)?;
            Ok(())
        })
    }
}

fn write_manifest(dir: &Path, entries: &[ManifestEntry]) -> CliResult {
    io::write_atomic(&dir.join("manifest.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, entries)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn score_extrinsic(args: crate::ScoreArgs) -> CliResult {
    let positive = match args.positive {
        0 => false,
        1 => true,
        other => {
            return Err(CliError::validation(anyhow!(
                "--positive must be 0 or 1, got {other}"
            )))
        }
    };
    let records: Vec<PredictionRecord> = if let Some(path) = &args.predictions {
        let file = std::fs::File::open(path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(CliError::validation)?;
        read_predictions_csv(file).map_err(CliError::validation)?
    } else if let (Some(train), Some(eval), Some(embedding)) =
        (&args.train_corpus, &args.eval_corpus, &args.embedding)
    {
        let e = io::load_embedding(embedding)?;
        let train_corpus = io::load_corpus(train)?;
        let eval_corpus = io::load_corpus(eval)?;
        let clf = train_standin_classifier(&train_corpus, &e, args.reg, args.seed)
            .map_err(CliError::validation)?;
        let records = predict_records(&clf, &eval_corpus, &e).map_err(CliError::validation)?;
        if let Some(out) = &args.predictions_out {
            io::write_atomic(out, |w| {
                write_predictions_csv(&records, w)?;
                Ok(())
            })?;
        }
        records
    } else {
        return Err(CliError::validation(anyhow!(
            "provide --predictions or --train-corpus/--eval-corpus/--embedding"
        )));
    };

    let scores = grouped_prf(&records, positive).map_err(CliError::validation)?;
    let diff =
        |m: Measure| embias_core::bias_score(&records, &args.group_a, &args.group_b, m, positive);
    let report = json!({
        "groups": scores.groups,
        "precision_diff": diff(Measure::Precision).map_err(CliError::validation)?,
        "recall_diff": diff(Measure::Recall).map_err(CliError::validation)?,
        "f1_diff": diff(Measure::F1).map_err(CliError::validation)?,
        "group_a": args.group_a,
        "group_b": args.group_b,
    });
    io::print_json(&report)
}

pub fn correlate(args: crate::CorrelateArgs) -> CliResult {
    let table = RunTable::from_csv_file(&args.table).map_err(CliError::validation)?;
    if args.intrinsic.is_empty() || args.extrinsic.is_empty() {
        return Err(CliError::validation(anyhow!(
            "--intrinsic and --extrinsic need at least one column each"
        )));
    }
    let cells = correlate_table(
        &table,
        &args.intrinsic,
        &args.extrinsic,
        args.resamples,
        args.seed,
    )
    .map_err(CliError::validation)?;
    io::write_output(args.output.as_deref(), |w| {
        write_correlation_csv(&cells, w)?;
        Ok(())
    })
}

pub fn scatter(args: crate::ScatterArgs) -> CliResult {
    let table = RunTable::from_csv_file(&args.table).map_err(CliError::validation)?;
    let rows = emit_scatter(&table, &args.x, &args.y).map_err(CliError::validation)?;
    io::write_output(args.output.as_deref(), |w| {
        write_scatter_csv(&rows, &args.x, &args.y, w)?;
        Ok(())
    })
}

pub fn synth(args: crate::SynthArgs) -> CliResult {
    let mut spec = SyntheticSpec::new(args.beta, args.seed);
    spec.dim = args.dim;
    spec.noise_scale = args.noise;
    if let Some(sizes) = &args.sizes {
        let [t1, t2, a1, a2, filler]: [usize; 5] = sizes
            .clone()
            .try_into()
            .map_err(|_| CliError::validation(anyhow!("--sizes needs five values")))?;
        spec.t1_size = t1;
        spec.t2_size = t2;
        spec.a1_size = a1;
        spec.a2_size = a2;
        spec.filler_size = filler;
    }
    match args.kind.as_str() {
        "embedding" => {
            let (e, quad) = make_biased_embedding(&spec).map_err(CliError::validation)?;
            io::write_atomic(&args.output, |w| {
                save_embedding(&e, w)?;
                Ok(())
            })?;
            if let Some(path) = &args.wordsets_out {
                io::write_atomic(path, |w| {
                    quad.to_json_writer(w)?;
                    Ok(())
                })?;
            }
            Ok(())
        }
        "corpus" => {
            let corpus =
                make_biased_corpus(&spec, args.docs_per_group).map_err(CliError::validation)?;
            io::write_atomic(&args.output, |w| {
                corpus.to_jsonl_writer(w)?;
                Ok(())
            })
        }
        other => Err(CliError::validation(anyhow!(
            "unknown kind '{other}' (expected embedding or corpus)"
        ))),
    }
}
