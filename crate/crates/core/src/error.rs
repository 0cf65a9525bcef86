//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed embedding header: {0}")]
    MalformedHeader(String),
    #[error("vector for '{word}' has {found} components, expected {expected}")]
    DimensionMismatch {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate word '{0}' in embedding (matching is case-insensitive)")]
    DuplicateWord(String),
    #[error("non-finite component in vector for '{0}'")]
    NonFiniteValue(String),
    #[error("embedding declares {expected} rows but {found} were read")]
    RowCount { expected: usize, found: usize },
    #[error("word '{0}' is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("attribute word '{0}' is not in the vocabulary")]
    OovAttribute(String),
    #[error("vector for '{0}' has zero norm; cosine is undefined")]
    ZeroNorm(String),
    #[error("empty expression")]
    EmptyExpression,
    #[error("word set '{0}' is empty")]
    EmptyWordSet(String),
    #[error("word '{word}' appears in more than one word set (or twice in '{set}')")]
    WordSetOverlap { word: String, set: String },
    #[error("target sets must have equal size, got {t1} and {t2}")]
    TargetSizeMismatch { t1: usize, t2: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("class '{0}' has no documents")]
    EmptyClass(String),
    #[error("PMI is undefined for '{0}': zero probability under every class")]
    UndefinedPmi(String),
    #[error("group '{0}' has no records")]
    MissingGroup(String),
    #[error("need {needed} words after curation but only {available} remain")]
    InsufficientWords { needed: usize, available: usize },
    #[error("column '{0}' not found in run table")]
    MissingColumn(String),
    #[error("duplicate variant id '{0}' in run table")]
    DuplicateVariantId(String),
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} observations, got {n}")]
    TooFewObservations { n: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("training diverged: loss is not finite")]
    NonFiniteLoss,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
