//! End-to-end tests of the embias binary: exit codes, output formats,
//! determinism and the pipeline driver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn embias() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embias"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    embias()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawning embias")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert_success(out);
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }
}

/// Two aligned clusters: T1/A1 on the x axis, T2/A2 on the y axis.
const ALIGNED_EMBEDDING: &str = "8 2\n\
    t1a 1 0\nt1b 1 0\nt2a 0 1\nt2b 0 1\n\
    a1a 1 0\na1b 1 0\na2a 0 1\na2b 0 1\n";

const ALIGNED_QUAD: &str =
    r#"{"t1":["t1a","t1b"],"t2":["t2a","t2b"],"a1":["a1a","a1b"],"a2":["a2a","a2b"]}"#;

#[test]
fn weat_prints_statistic_and_effect_size() {
    let ws = Workspace::new();
    ws.file("e.txt", ALIGNED_EMBEDDING);
    ws.file("q.json", ALIGNED_QUAD);
    let out = run(
        &["weat", "--embedding", "e.txt", "--wordsets", "q.json"],
        ws.path(),
    );
    let json = stdout_json(&out);
    assert!((json["statistic"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!((json["effect_size"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn rnsb_reports_signed_and_kl_values() {
    let ws = Workspace::new();
    ws.file("e.txt", ALIGNED_EMBEDDING);
    ws.file("q.json", ALIGNED_QUAD);
    let out = run(
        &[
            "rnsb",
            "--embedding",
            "e.txt",
            "--wordsets",
            "q.json",
            "--seeds",
            "0,1",
        ],
        ws.path(),
    );
    let json = stdout_json(&out);
    assert!(json["kl_value"].as_f64().unwrap() >= 0.0);
    let signed = json["signed_value"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&signed));
}

#[test]
fn unknown_flags_and_subcommands_exit_one_with_usage() {
    let ws = Workspace::new();
    let out = run(&["weat", "--bogus"], ws.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("Usage") || stderr.contains("usage"),
        "{stderr}"
    );

    let out = run(&["frobnicate"], ws.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_file_is_a_validation_error() {
    let ws = Workspace::new();
    ws.file("q.json", ALIGNED_QUAD);
    let out = run(
        &["weat", "--embedding", "nope.txt", "--wordsets", "q.json"],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let ws = Workspace::new();
    ws.file("e.txt", ALIGNED_EMBEDDING);
    ws.file("q.json", ALIGNED_QUAD);
    // a file where a directory is needed
    ws.file("blocker", "");
    let out = run(
        &[
            "expand-wordset",
            "--wordsets",
            "q.json",
            "--aux",
            "e.txt",
            "--k",
            "1",
            "--output",
            "blocker/out.json",
        ],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn attract_repel_is_deterministic_and_leaves_inputs_alone() {
    let ws = Workspace::new();
    let embedding = ws.file("e.txt", ALIGNED_EMBEDDING);
    let quad = ws.file("q.json", ALIGNED_QUAD);
    let before_e = fs::read(&embedding).unwrap();
    let before_q = fs::read(&quad).unwrap();

    let args = [
        "attract-repel",
        "--embedding",
        "e.txt",
        "--wordsets",
        "q.json",
        "--epochs",
        "5",
        "--seed",
        "3",
        "--output",
    ];
    let mut first = args.to_vec();
    first.push("out1.txt");
    assert_success(&run(&first, ws.path()));
    let mut second = args.to_vec();
    second.push("out2.txt");
    assert_success(&run(&second, ws.path()));

    let out1 = fs::read(ws.path().join("out1.txt")).unwrap();
    let out2 = fs::read(ws.path().join("out2.txt")).unwrap();
    assert_eq!(out1, out2, "identical runs must be byte-identical");
    assert_ne!(out1, before_e);

    assert_eq!(
        fs::read(&embedding).unwrap(),
        before_e,
        "input embedding mutated"
    );
    assert_eq!(
        fs::read(&quad).unwrap(),
        before_q,
        "input word sets mutated"
    );
}

#[test]
fn balance_p_zero_drops_every_stereotypical_sentence() {
    let ws = Workspace::new();
    ws.file("q.json", ALIGNED_QUAD);
    ws.file(
        "corpus.txt",
        "t1a a1a filler\nt1a a2a filler\nplain filler line\n",
    );
    let out = run(
        &[
            "balance",
            "--corpus",
            "corpus.txt",
            "--wordsets",
            "q.json",
            "--mode",
            "debias",
            "--p",
            "0.0",
            "--seed",
            "1",
            "--output",
            "balanced.txt",
        ],
        ws.path(),
    );
    assert_success(&out);
    let text = fs::read_to_string(ws.path().join("balanced.txt")).unwrap();
    assert_eq!(text, "t1a a2a filler\nplain filler line\n");
}

#[test]
fn balance_grid_emits_twenty_variants_and_a_manifest() {
    let ws = Workspace::new();
    ws.file("q.json", ALIGNED_QUAD);
    ws.file("corpus.txt", "t1a a1a filler\nplain filler line\n");
    let out = run(
        &[
            "balance",
            "--corpus",
            "corpus.txt",
            "--wordsets",
            "q.json",
            "--grid",
            "--output-dir",
            "grid",
            "--seed",
            "0",
        ],
        ws.path(),
    );
    assert_success(&out);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(ws.path().join("grid/manifest.json")).unwrap())
            .unwrap();
    let entries = manifest.as_array().unwrap();
    assert_eq!(entries.len(), 20);
    for entry in entries {
        assert_eq!(entry["kind"], "corpus");
        let path = entry["output_path"].as_str().unwrap();
        assert!(ws.path().join(path).exists(), "missing {path}");
    }
}

#[test]
fn extract_words_emits_candidate_csv_and_curated_lists() {
    let ws = Workspace::new();
    let mut corpus = String::new();
    for i in 0..30 {
        if i % 2 == 0 {
            corpus.push_str(r#"{"tokens":["slur","base"],"hate":"HS","group":"G1"}"#);
        } else {
            corpus.push_str(r#"{"tokens":["kind","base"],"hate":"NON_HS","group":"G2"}"#);
        }
        corpus.push('\n');
    }
    ws.file("corpus.jsonl", &corpus);
    let out = run(
        &[
            "extract-words",
            "--corpus",
            "corpus.jsonl",
            "--axis",
            "hate",
            "--label",
            "HS",
            "--min-docs",
            "5",
        ],
        ws.path(),
    );
    assert_success(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("word,pmi_bits,doc_freq,corpus_freq"));
    assert!(text.lines().nth(1).unwrap().starts_with("slur,1,15,15"));

    // curated flow: drop the slur, keep one word
    ws.file("exclude.txt", "slur\n");
    let out = run(
        &[
            "extract-words",
            "--corpus",
            "corpus.jsonl",
            "--axis",
            "hate",
            "--label",
            "HS",
            "--min-docs",
            "5",
            "--exclude",
            "exclude.txt",
            "--final-n",
            "1",
        ],
        ws.path(),
    );
    assert_success(&out);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "base\n");
}

#[test]
fn correlate_and_scatter_read_run_tables() {
    let ws = Workspace::new();
    ws.file(
        "table.csv",
        "variant_id,i1,e1\nv0,0,0.1\nv1,1,0.4\nv2,2,0.2\nv3,3,0.9\nv4,4,1.4\n",
    );
    let out = run(
        &[
            "correlate",
            "--table",
            "table.csv",
            "--intrinsic",
            "i1",
            "--extrinsic",
            "e1",
            "--resamples",
            "999",
            "--seed",
            "0",
        ],
        ws.path(),
    );
    assert_success(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("intrinsic,extrinsic,rho,p_value,n"));
    assert!(text.contains("i1,e1,0.9,"));

    let out = run(
        &["scatter", "--table", "table.csv", "--x", "i1", "--y", "e1"],
        ws.path(),
    );
    assert_success(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("variant_id,i1,e1"));
}

#[test]
fn score_extrinsic_from_prediction_csv() {
    let ws = Workspace::new();
    ws.file(
        "preds.csv",
        "gold,pred,group\n1,1,a\n1,0,a\n0,0,a\n1,1,b\n0,1,b\n0,0,b\n",
    );
    let out = run(
        &[
            "score-extrinsic",
            "--predictions",
            "preds.csv",
            "--group-a",
            "a",
            "--group-b",
            "b",
        ],
        ws.path(),
    );
    let json = stdout_json(&out);
    // group a: P 1, R 1/2; group b: P 1/2, R 1
    assert!((json["precision_diff"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((json["recall_diff"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert!(json["groups"]["a"]["support"].as_u64().unwrap() == 3);
}

#[test]
fn pipeline_emits_consistent_artifacts() {
    let ws = Workspace::new();
    ws.file(
        "config.json",
        r#"{
            "output_dir": "out",
            "master_seed": 0,
            "resamples": 999,
            "synth": {"beta_grid": [0.0, 0.5, 1.0], "docs_per_group": 50}
        }"#,
    );
    let out = run(&["pipeline", "--config", "config.json"], ws.path());
    assert_success(&out);

    let runtable = fs::read_to_string(ws.path().join("out/runtable.csv")).unwrap();
    assert_eq!(runtable.lines().count(), 4);
    let correlations = fs::read_to_string(ws.path().join("out/correlations.csv")).unwrap();
    // 4 intrinsic columns x 3 extrinsic columns plus the header
    assert_eq!(correlations.lines().count(), 13);
    assert!(ws
        .path()
        .join("out/scatter/weat_effect_size__recall_diff.csv")
        .exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(ws.path().join("out/manifest.json")).unwrap())
            .unwrap();
    // per beta: one embedding and two corpora
    assert_eq!(manifest.as_array().unwrap().len(), 9);

    // replaying weat on an emitted variant reproduces its run-table cell
    let replay = run(
        &[
            "weat",
            "--embedding",
            "out/variants/synth-b0.5.txt",
            "--wordsets",
            "out/wordsets.json",
        ],
        ws.path(),
    );
    let json = stdout_json(&replay);
    let effect = json["effect_size"].as_f64().unwrap();
    let row = runtable
        .lines()
        .find(|l| l.starts_with("synth-b0.5,"))
        .unwrap();
    let header: Vec<&str> = runtable.lines().next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == "weat_effect_size")
        .unwrap();
    let cell: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
    assert_eq!(cell, effect, "run-table cell must replay exactly");

    // byte-identical rerun
    ws.file(
        "config2.json",
        r#"{
            "output_dir": "out2",
            "master_seed": 0,
            "resamples": 999,
            "synth": {"beta_grid": [0.0, 0.5, 1.0], "docs_per_group": 50}
        }"#,
    );
    let out = run(&["pipeline", "--config", "config2.json"], ws.path());
    assert_success(&out);
    let rerun = fs::read_to_string(ws.path().join("out2/runtable.csv")).unwrap();
    assert_eq!(runtable, rerun);
}

#[test]
fn synth_rejects_bad_kind_and_bad_beta() {
    let ws = Workspace::new();
    let out = run(
        &[
            "synth", "--kind", "noise", "--beta", "0.5", "--output", "x.txt",
        ],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(
        &[
            "synth",
            "--kind",
            "embedding",
            "--beta",
            "1.5",
            "--output",
            "x.txt",
        ],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
