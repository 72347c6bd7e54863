//! Multinomial naive Bayes over character n-grams.
//!
//! Deliberately boring: no tokenizer dependency, deterministic, immutable
//! after training, cheap to serialize. Character 1–3-grams handle the
//! spelling variance of social-media Vietnamese (teencode, dropped
//! diacritics) better than word features at this model size.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Annotator, AnnotatorError, WeakLabelError};
use crate::normalize::CleanText;
use crate::task::{Alphabet, ClassLabel};

const CLASS_COUNT: usize = 2; // NONE = 0, HATE = 1

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Smallest n-gram length, in characters.
    pub n_min: usize,
    /// Largest n-gram length, in characters.
    pub n_max: usize,
    /// Additive smoothing constant.
    pub smoothing: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            n_min: 1,
            n_max: 3,
            smoothing: 1.0,
        }
    }
}

/// A trained naive-Bayes model. N-grams are packed into `u64` keys
/// (21 bits per scalar value, length-discriminating), so inference does
/// no string allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    config: BaselineConfig,
    class_log_prior: [f64; CLASS_COUNT],
    /// n-gram key → per-class smoothed log likelihood.
    log_likelihood: BTreeMap<u64, [f64; CLASS_COUNT]>,
}

fn pack_ngram(chars: &[char]) -> u64 {
    debug_assert!(chars.len() <= 3);
    let mut key = 0u64;
    for &c in chars {
        key = (key << 21) | (c as u64 + 1);
    }
    key
}

fn for_each_ngram(text: &str, config: &BaselineConfig, mut f: impl FnMut(u64)) {
    let chars: Vec<char> = text.chars().collect();
    for i in 0..chars.len() {
        let max_n = config.n_max.min(chars.len() - i);
        for n in config.n_min..=max_n {
            f(pack_ngram(&chars[i..i + n]));
        }
    }
}

/// Trains the baseline on binary-labeled examples. Requires at least one
/// example of each class; deterministic for a fixed example order.
pub fn train_baseline(
    examples: &[(CleanText, ClassLabel)],
    config: BaselineConfig,
) -> Result<BaselineModel, WeakLabelError> {
    let mut class_totals = [0u64; CLASS_COUNT];
    let mut gram_counts: BTreeMap<u64, [u64; CLASS_COUNT]> = BTreeMap::new();
    let mut doc_counts = [0u64; CLASS_COUNT];

    for (text, label) in examples {
        if label.alphabet() != Alphabet::Binary {
            return Err(WeakLabelError::NonBinaryLabel {
                got: label.name().to_string(),
            });
        }
        let class = label.id() as usize;
        doc_counts[class] += 1;
        for_each_ngram(text.text(), &config, |key| {
            gram_counts.entry(key).or_default()[class] += 1;
            class_totals[class] += 1;
        });
    }

    for (class, &count) in doc_counts.iter().enumerate() {
        if count == 0 {
            return Err(WeakLabelError::DegenerateTrainingSet {
                class: Alphabet::Binary.labels()[class],
            });
        }
    }

    let total_docs = (doc_counts[0] + doc_counts[1]) as f64;
    let class_log_prior = [
        (doc_counts[0] as f64 / total_docs).ln(),
        (doc_counts[1] as f64 / total_docs).ln(),
    ];
    let vocab_size = gram_counts.len() as f64;
    let log_likelihood = gram_counts
        .into_iter()
        .map(|(key, counts)| {
            let mut ll = [0.0; CLASS_COUNT];
            for class in 0..CLASS_COUNT {
                ll[class] = ((counts[class] as f64 + config.smoothing)
                    / (class_totals[class] as f64 + config.smoothing * vocab_size))
                    .ln();
            }
            (key, ll)
        })
        .collect();

    Ok(BaselineModel {
        config,
        class_log_prior,
        log_likelihood,
    })
}

impl BaselineModel {
    pub fn config(&self) -> BaselineConfig {
        self.config
    }

    pub fn vocab_size(&self) -> usize {
        self.log_likelihood.len()
    }

    /// Classifies one text, returning the predicted label and its
    /// posterior probability. N-grams unseen in training are ignored.
    pub fn classify(&self, text: &CleanText) -> (ClassLabel, f64) {
        let mut log_posterior = self.class_log_prior;
        for_each_ngram(text.text(), &self.config, |key| {
            if let Some(ll) = self.log_likelihood.get(&key) {
                log_posterior[0] += ll[0];
                log_posterior[1] += ll[1];
            }
        });
        let predicted = if log_posterior[1] > log_posterior[0] { 1 } else { 0 };
        let m = log_posterior[0].max(log_posterior[1]);
        let z = (log_posterior[0] - m).exp() + (log_posterior[1] - m).exp();
        let score = (log_posterior[predicted] - m).exp() / z;
        let label = Alphabet::Binary
            .from_id(predicted as u8)
            .expect("binary id in range");
        (label, score)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), WeakLabelError> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)
            .map_err(|e| WeakLabelError::Io(e.into()))?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, WeakLabelError> {
        let file = std::fs::File::open(path)?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| WeakLabelError::Io(e.into()))
    }
}

impl Annotator for BaselineModel {
    fn classify_batch(
        &self,
        texts: &[CleanText],
    ) -> Result<Vec<(ClassLabel, f64)>, AnnotatorError> {
        // per-text work is independent and pure, so parallel order-preserving
        // map keeps output deterministic regardless of worker count
        Ok(texts.par_iter().map(|t| self.classify(t)).collect())
    }

    fn id(&self) -> &str {
        "builtin-nb"
    }
}
