//! embias: bias metrics, word extraction, bias modification and correlation
//! studies for static word embeddings.

mod commands;
mod io;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit code policy: 0 success, 1 validation error (bad flags or inputs),
/// 2 runtime error (failed writes, mid-run failures).
pub enum CliError {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    fn validation(e: impl Into<anyhow::Error>) -> Self {
        CliError::Validation(e.into())
    }
    fn runtime(e: impl Into<anyhow::Error>) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(
    name = "embias",
    about = "Bias measurement toolkit for static word embeddings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// WEAT statistic and effect size for an embedding and a word-set quad
    Weat(WeatArgs),
    /// KL and signed RNSB, averaged over classifier seeds
    Rnsb(RnsbArgs),
    /// Extract candidate words from a labeled corpus by PMI
    ExtractWords(ExtractArgs),
    /// Expand each word set with nearest neighbors from an auxiliary embedding
    ExpandWordset(ExpandArgs),
    /// Down-sample stereotypical or anti-stereotypical sentences
    Balance(BalanceArgs),
    /// Specialize an embedding by attracting and repelling word pairs
    AttractRepel(AttractRepelArgs),
    /// Grouped precision/recall/F1 and bias scores from predictions
    ScoreExtrinsic(ScoreArgs),
    /// Spearman correlation grid with permutation p-values over a run table
    Correlate(CorrelateArgs),
    /// Scatter data for one (x, y) column pair of a run table
    Scatter(ScatterArgs),
    /// Generate a synthetic embedding or corpus with planted bias
    Synth(SynthArgs),
    /// Run the full correlation study from a JSON config
    Pipeline(PipelineArgs),
}

#[derive(Args)]
pub struct WeatArgs {
    /// Embedding in word2vec text format
    #[arg(long)]
    embedding: PathBuf,
    /// Word-set quad JSON with keys t1, t2, a1, a2
    #[arg(long)]
    wordsets: PathBuf,
    /// Prune out-of-vocabulary target words first, with this sampling seed
    #[arg(long)]
    prune_seed: Option<u64>,
}

#[derive(Args)]
pub struct RnsbArgs {
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    wordsets: PathBuf,
    /// Explicit training seeds (default 0..9)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// L2 regularization strength
    #[arg(long, default_value_t = 1.0)]
    reg: f64,
    #[arg(long)]
    prune_seed: Option<u64>,
}

#[derive(Args)]
pub struct ExtractArgs {
    /// Labeled corpus in JSON Lines format
    #[arg(long)]
    corpus: PathBuf,
    /// Label axis: hate or group
    #[arg(long)]
    axis: String,
    /// Label whose characteristic words are wanted (e.g. HS, MALE)
    #[arg(long)]
    label: String,
    #[arg(long, default_value_t = 40)]
    top_n: usize,
    #[arg(long, default_value_t = 10)]
    min_docs: usize,
    /// Add-alpha smoothing for the token distributions
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Curation: file with one word to drop per line
    #[arg(long)]
    exclude: Option<PathBuf>,
    /// Curation: file with one word to append per line
    #[arg(long)]
    include: Option<PathBuf>,
    /// Curation: cut the final list to exactly this many words
    #[arg(long)]
    final_n: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExpandArgs {
    #[arg(long)]
    wordsets: PathBuf,
    /// Auxiliary embedding supplying the neighbors
    #[arg(long)]
    aux: PathBuf,
    /// Neighbors added per seed word
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
pub struct BalanceArgs {
    /// Corpus with one sentence per line, space-separated tokens
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    wordsets: PathBuf,
    /// debias or overbias
    #[arg(long, default_value = "debias")]
    mode: String,
    /// Keep probability for targeted sentences
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Single-run output file
    #[arg(long, conflicts_with = "grid")]
    output: Option<PathBuf>,
    /// Emit the full 20-variant grid instead of a single run
    #[arg(long, requires = "output_dir")]
    grid: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct AttractRepelArgs {
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    wordsets: PathBuf,
    #[arg(long, default_value = "debias")]
    mode: String,
    #[arg(long, default_value_t = 1.0)]
    delta_sim: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_ant: f64,
    #[arg(long, default_value_t = 1e-2)]
    lambda: f64,
    #[arg(long, default_value_t = 50)]
    syn_batch: usize,
    #[arg(long, default_value_t = 50)]
    ant_batch: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "grid")]
    output: Option<PathBuf>,
    /// Emit the full 24-variant grid instead of a single run
    #[arg(long, requires = "output_dir")]
    grid: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Prediction CSV (gold,pred,group) to score directly
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Train the stand-in classifier on this labeled corpus instead
    #[arg(long, requires_all = ["eval_corpus", "embedding"])]
    train_corpus: Option<PathBuf>,
    #[arg(long)]
    eval_corpus: Option<PathBuf>,
    #[arg(long)]
    embedding: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    reg: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the stand-in's prediction records
    #[arg(long)]
    predictions_out: Option<PathBuf>,
    /// Group whose score enters positively
    #[arg(long)]
    group_a: String,
    /// Group whose score is subtracted
    #[arg(long)]
    group_b: String,
    /// Positive label (0 or 1)
    #[arg(long, default_value_t = 1)]
    positive: u8,
}

#[derive(Args)]
pub struct CorrelateArgs {
    /// Run table CSV: variant_id plus metric columns
    #[arg(long)]
    table: PathBuf,
    #[arg(long, value_delimiter = ',')]
    intrinsic: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    extrinsic: Vec<String>,
    #[arg(long, default_value_t = 9999)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScatterArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// What to generate: embedding or corpus
    #[arg(long)]
    kind: String,
    /// Bias strength in [0, 1]
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    /// Set sizes as t1,t2,a1,a2,filler
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Documents per group for corpus generation
    #[arg(long, default_value_t = 100)]
    docs_per_group: usize,
    #[arg(long)]
    output: PathBuf,
    /// Also write the matching word-set quad (embedding kind only)
    #[arg(long)]
    wordsets_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PipelineArgs {
    /// JSON pipeline configuration
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    // clap would exit(2) on usage errors; the contract is exit 1 with usage
    // on stderr
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            // --help and --version go to stdout and exit 0
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let result = match cli.command {
        Command::Weat(args) => commands::weat(args),
        Command::Rnsb(args) => commands::rnsb(args),
        Command::ExtractWords(args) => commands::extract_words(args),
        Command::ExpandWordset(args) => commands::expand_wordset(args),
        Command::Balance(args) => commands::balance(args),
        Command::AttractRepel(args) => commands::attract_repel(args),
        Command::ScoreExtrinsic(args) => commands::score_extrinsic(args),
        Command::Correlate(args) => commands::correlate(args),
        Command::Scatter(args) => commands::scatter(args),
        Command::Synth(args) => commands::synth(args),
        Command::Pipeline(args) => pipeline::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
