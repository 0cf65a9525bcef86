//! Input loading and atomic output writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use embias_core::{Embedding, LabeledCorpus, WordSetQuad};

use crate::{CliError, CliResult};

pub fn load_embedding(path: &Path) -> Result<Embedding, CliError> {
    embias_core::embedding::load_embedding_file(path)
        .with_context(|| format!("loading embedding {}", path.display()))
        .map_err(CliError::validation)
}

pub fn load_quad(path: &Path) -> Result<WordSetQuad, CliError> {
    WordSetQuad::from_json_file(path)
        .with_context(|| format!("loading word sets {}", path.display()))
        .map_err(CliError::validation)
}

pub fn load_corpus(path: &Path) -> Result<LabeledCorpus, CliError> {
    LabeledCorpus::from_jsonl_file(path)
        .with_context(|| format!("loading corpus {}", path.display()))
        .map_err(CliError::validation)
}

/// Sentences as token lists, one sentence per line, lowercased.
pub fn load_sentences(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("loading sentences {}", path.display()))
        .map_err(CliError::validation)?;
    Ok(text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.to_lowercase().split(' ').map(String::from).collect())
        .collect())
}

/// Words one per line, lowercased; empty lines skipped.
pub fn load_word_list(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("loading word list {}", path.display()))
        .map_err(CliError::validation)?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

/// Write through a temp file in the target directory, then rename.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult
where
    F: FnOnce(&mut dyn Write) -> anyhow::Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(CliError::runtime)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .context("creating temp file")
        .map_err(CliError::runtime)?;
    fill(tmp.as_file_mut()).map_err(CliError::runtime)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::runtime)?;
    Ok(())
}

/// Write to the file when given, stdout otherwise.
pub fn write_output<F>(path: Option<&Path>, fill: F) -> CliResult
where
    F: FnOnce(&mut dyn Write) -> anyhow::Result<()>,
{
    match path {
        Some(path) => write_atomic(path, fill),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            fill(&mut lock).map_err(CliError::runtime)
        }
    }
}

pub fn print_json<T: serde::Serialize>(value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(CliError::runtime)?;
    println!("{text}");
    Ok(())
}
