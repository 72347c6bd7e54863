//! Accuracy, weighted F1, and macro F1 for the classification tasks, plus
//! character-level span evaluation and the cross-task average.
//!
//! Conventions that change degenerate-case numbers, fixed here once:
//!
//! - A class with zero predicted and zero actual positives gets F1 = 0 and
//!   still counts in the macro mean (the default of the mainstream metric
//!   implementations baseline results rely on).
//! - The macro mean runs over every class of the gold alphabet, present in
//!   the data or not.
//! - Span metrics aggregate globally over the concatenated per-character
//!   0/1 stream of the whole corpus, not per example.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::CleanText;
use crate::span::{spans_to_mask, SpanError, SpanSet};
use crate::task::{Alphabet, ClassLabel, Task};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("cannot evaluate an empty input")]
    EmptyInput,
    #[error("gold and prediction lengths differ: {golds} vs {preds}")]
    LengthMismatch { golds: usize, preds: usize },
    #[error("labels from different alphabets in one evaluation")]
    TaskMismatch,
    #[error("summary requires one report for task {task}")]
    MissingTask { task: Task },
    #[error("summary got {count} reports, expected exactly 3")]
    WrongReportCount { count: usize },
    #[error(transparent)]
    Span(#[from] SpanError),
}

/// Precision, recall, F1, and gold support for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Evaluation results for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub macro_f1: f64,
    pub per_class: BTreeMap<String, PerClass>,
    pub n_examples: usize,
}

/// Per-task reports plus the arithmetic mean of their macro F1 scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub reports: Vec<EvalReport>,
    pub average_mf1: f64,
}

/// Square confusion matrix over class ids; rows are gold, columns are
/// predicted. Counting is commutative, so shard matrices merge cleanly.
#[derive(Debug, Clone)]
struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<usize>,
}

impl ConfusionMatrix {
    fn new(n_classes: usize) -> Self {
        ConfusionMatrix {
            n_classes,
            counts: vec![0; n_classes * n_classes],
        }
    }

    fn record(&mut self, gold: usize, pred: usize) {
        self.counts[gold * self.n_classes + pred] += 1;
    }

    fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    fn diagonal(&self) -> usize {
        (0..self.n_classes)
            .map(|c| self.counts[c * self.n_classes + c])
            .sum()
    }

    fn gold_count(&self, class: usize) -> usize {
        (0..self.n_classes)
            .map(|p| self.counts[class * self.n_classes + p])
            .sum()
    }

    fn pred_count(&self, class: usize) -> usize {
        (0..self.n_classes)
            .map(|g| self.counts[g * self.n_classes + class])
            .sum()
    }

    fn per_class(&self, class: usize) -> PerClass {
        let tp = self.counts[class * self.n_classes + class] as f64;
        let support = self.gold_count(class);
        let predicted = self.pred_count(class) as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = if support > 0 { tp / support as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PerClass {
            precision,
            recall,
            f1,
            support,
        }
    }

    fn into_report(self, task: Task, class_names: &[&str]) -> EvalReport {
        let n = self.total();
        let mut per_class = BTreeMap::new();
        let mut macro_sum = 0.0;
        let mut weighted_sum = 0.0;
        for (id, name) in class_names.iter().enumerate() {
            let pc = self.per_class(id);
            macro_sum += pc.f1;
            weighted_sum += pc.f1 * pc.support as f64;
            per_class.insert((*name).to_string(), pc);
        }
        EvalReport {
            task,
            accuracy: self.diagonal() as f64 / n as f64,
            weighted_f1: weighted_sum / n as f64,
            macro_f1: macro_sum / class_names.len() as f64,
            per_class,
            n_examples: n,
        }
    }
}

fn task_for_alphabet(alphabet: Alphabet) -> Task {
    match alphabet {
        Alphabet::HateSpeech | Alphabet::Binary => Task::HateSpeechDetection,
        Alphabet::ToxicSpeech => Task::ToxicSpeechDetection,
    }
}

/// Standard multi-class evaluation. All labels must share one alphabet;
/// every class of that alphabet participates in the macro mean.
pub fn classification_eval(
    golds: &[ClassLabel],
    preds: &[ClassLabel],
) -> Result<EvalReport, MetricsError> {
    if golds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if golds.len() != preds.len() {
        return Err(MetricsError::LengthMismatch {
            golds: golds.len(),
            preds: preds.len(),
        });
    }
    let alphabet = golds[0].alphabet();
    if golds
        .iter()
        .chain(preds)
        .any(|l| l.alphabet() != alphabet)
    {
        return Err(MetricsError::TaskMismatch);
    }
    let mut matrix = ConfusionMatrix::new(alphabet.class_count());
    for (g, p) in golds.iter().zip(preds) {
        matrix.record(g.id() as usize, p.id() as usize);
    }
    Ok(matrix.into_report(task_for_alphabet(alphabet), alphabet.labels()))
}

/// Character-level span evaluation: every gold and predicted span set is
/// expanded to a per-character 0/1 mask, the masks are concatenated over
/// the corpus, and the stream is scored as binary classification with
/// classes `{0, 1}`.
pub fn span_eval(
    golds: &[SpanSet],
    preds: &[SpanSet],
    texts: &[CleanText],
) -> Result<EvalReport, MetricsError> {
    if golds.len() != preds.len() || golds.len() != texts.len() {
        return Err(MetricsError::LengthMismatch {
            golds: golds.len(),
            preds: preds.len(),
        });
    }
    let mut matrix = ConfusionMatrix::new(2);
    for ((gold, pred), text) in golds.iter().zip(preds).zip(texts) {
        let gold_mask = spans_to_mask(gold, text)?;
        let pred_mask = spans_to_mask(pred, text)?;
        for (g, p) in gold_mask.bits().iter().zip(pred_mask.bits()) {
            matrix.record(*g as usize, *p as usize);
        }
    }
    if matrix.total() == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(matrix.into_report(Task::HateSpansDetection, &["0", "1"]))
}

/// Arithmetic mean of the three tasks' macro F1 scores. Requires exactly
/// one report per task.
pub fn average_mf1(reports: &[EvalReport]) -> Result<f64, MetricsError> {
    if reports.len() != 3 {
        return Err(MetricsError::WrongReportCount {
            count: reports.len(),
        });
    }
    for task in Task::ALL {
        if !reports.iter().any(|r| r.task == task) {
            return Err(MetricsError::MissingTask { task });
        }
    }
    Ok(reports.iter().map(|r| r.macro_f1).sum::<f64>() / reports.len() as f64)
}

/// Builds a [`SummaryReport`], validating task coverage.
pub fn summarize(reports: Vec<EvalReport>) -> Result<SummaryReport, MetricsError> {
    let average_mf1 = average_mf1(&reports)?;
    Ok(SummaryReport {
        reports,
        average_mf1,
    })
}
