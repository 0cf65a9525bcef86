//! Bias measurement toolkit for static word embeddings.
//!
//! The crate measures intrinsic bias (WEAT, KL and signed RNSB) from
//! embedding geometry, extracts bias-representing word sets from labeled
//! corpora via Naive Bayes PMI, generates embedding and corpus variants along
//! a bias spectrum (word-set expansion, dataset balancing, attract/repel
//! specialization), scores extrinsic bias from grouped prediction records,
//! and runs the intrinsic-vs-extrinsic correlation study end to end with
//! Spearman rank correlations and permutation p-values. A synthetic
//! benchmark with a planted bias knob makes the whole pipeline exercisable
//! at desk scale.
//!
//! Everything stochastic takes an explicit seed; identical inputs and seeds
//! give identical outputs.

pub mod attract_repel;
pub mod balance;
pub mod corpus;
pub mod correlation;
pub mod embedding;
pub mod error;
pub mod expand;
pub mod extraction;
pub mod logreg;
pub mod rnsb;
pub mod runtable;
pub mod scoring;
pub mod seed;
pub mod study;
pub mod synth;
pub mod variants;
pub mod weat;
pub mod wordsets;

pub use attract_repel::{attract_repel, build_pairs, AttractRepelConfig};
pub use balance::{balance_corpus, classify_sentence, BalanceConfig, Mode, SentenceClass};
pub use corpus::{Axis, HateLabel, LabeledCorpus, LabeledDocument};
pub use correlation::{
    correlate_table, emit_scatter, permutation_pvalue, spearman_rho, CorrelationCell,
};
pub use embedding::{load_embedding, prune_weat_targets, save_embedding, Embedding};
pub use error::{Error, Result};
pub use expand::expand_word_sets;
pub use extraction::{
    apply_curation, estimate_nb, extract_candidates, pmi, CandidateWord, NaiveBayesParams,
};
pub use rnsb::{rnsb, train_attribute_classifier, RnsbResult};
pub use runtable::RunTable;
pub use scoring::{
    bias_score, grouped_prf, predict_records, train_standin_classifier, GroupScores, Measure,
    PredictionRecord,
};
pub use synth::{make_biased_corpus, make_biased_embedding, SyntheticSpec};
pub use weat::{weat, weat_association, WeatResult};
pub use wordsets::WordSetQuad;
