//! Automated corpus annotation and label-ratio resampling.
//!
//! The annotation stage trains a binary hate classifier on a small
//! human-labeled set, then labels an arbitrarily large raw corpus in
//! bounded memory. The classifier is pluggable: the built-in character
//! n-gram naive Bayes ([`BaselineModel`]) stands in wherever a fine-tuned
//! neural model is not available, and [`RemoteAnnotator`] slots a served
//! model in over HTTP without touching the pipeline.

mod baseline;
mod label;
mod remote;
mod resample;
mod stats;
#[cfg(test)]
pub(crate) mod testsupport;

pub use baseline::{train_baseline, BaselineConfig, BaselineModel};
pub use label::{label_stream, run_labeling, Checkpoint, LabelStats};
pub use remote::{RemoteAnnotator, RemoteConfig, ENDPOINT_ENV};
pub use resample::{resample, RatioCondition, ResampleStats};
pub use stats::{corpus_stats, manifest_stats, StatsReport, TopicManifest, TopicRow};

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::normalize::CleanText;
use crate::task::{Alphabet, ClassLabel};

#[derive(Debug, Error)]
pub enum AnnotatorError {
    #[error("remote annotator unavailable after {attempts} attempts: {reason}")]
    RemoteUnavailable { attempts: u32, reason: String },
}

#[derive(Debug, Error)]
pub enum WeakLabelError {
    #[error("training set has no {class} examples")]
    DegenerateTrainingSet { class: &'static str },
    #[error("expected binary NONE/HATE labels, got {got:?}")]
    NonBinaryLabel { got: String },
    #[error("record {id} has no label")]
    Unlabeled { id: String },
    #[error("cannot balance: {clean} clean records < {hate} hate records")]
    InsufficientClean { clean: u64, hate: u64 },
    #[error("checkpoint at {committed} records but output holds {actual} bytes, expected {expected}")]
    CheckpointMismatch {
        committed: u64,
        expected: u64,
        actual: u64,
    },
    #[error(transparent)]
    Annotator(#[from] AnnotatorError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A binary hate classifier usable for corpus annotation.
///
/// Implementations are total over any batch: exactly one `(label, score)`
/// per input text, in input order. Scores are the posterior probability
/// of the predicted class when the backend provides one, else 1.0.
pub trait Annotator: Sync {
    fn classify_batch(
        &self,
        texts: &[CleanText],
    ) -> Result<Vec<(ClassLabel, f64)>, AnnotatorError>;

    /// Short identifier recorded on every labeled record.
    fn id(&self) -> &str;
}

/// Parses a record's stored label as binary NONE/HATE.
pub(crate) fn binary_label(
    record: &crate::corpus::LabeledRecord,
) -> Result<ClassLabel, WeakLabelError> {
    let name = record
        .label
        .as_deref()
        .ok_or_else(|| WeakLabelError::Unlabeled {
            id: record.id.clone(),
        })?;
    Alphabet::Binary
        .parse(name)
        .map_err(|_| WeakLabelError::NonBinaryLabel {
            got: name.to_string(),
        })
}
