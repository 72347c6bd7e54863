//! Corpus statistics: label and topic counts from a record stream, or
//! totals from a pre-aggregated topic manifest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::WeakLabelError;
use crate::corpus::{CorpusError, LabeledRecord};

/// Per-topic thread and comment totals, the shape crawl bookkeeping
/// arrives in before any records exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRow {
    pub topic: String,
    pub threads: u64,
    pub comments: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicManifest {
    pub topics: Vec<TopicRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub total_records: u64,
    pub label_counts: BTreeMap<String, u64>,
    pub topic_counts: BTreeMap<String, u64>,
    pub hate_count: u64,
    /// Fraction of records labeled HATE, rounded to 4 decimal places.
    /// 0.0 with `fraction_defined = false` on an empty corpus.
    pub hate_fraction: f64,
    pub fraction_defined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_threads: Option<u64>,
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// Counts labels and topics over a record stream.
pub fn corpus_stats(
    records: impl Iterator<Item = Result<LabeledRecord, CorpusError>>,
) -> Result<StatsReport, WeakLabelError> {
    let mut total = 0u64;
    let mut label_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut topic_counts: BTreeMap<String, u64> = BTreeMap::new();
    for record in records {
        let record = record?;
        total += 1;
        if let Some(label) = &record.label {
            *label_counts.entry(label.clone()).or_default() += 1;
        }
        if let Some(topic) = &record.topic {
            *topic_counts.entry(topic.clone()).or_default() += 1;
        }
    }
    let hate_count = label_counts.get("HATE").copied().unwrap_or(0);
    let fraction_defined = total > 0;
    let hate_fraction = if fraction_defined {
        round4(hate_count as f64 / total as f64)
    } else {
        0.0
    };
    Ok(StatsReport {
        total_records: total,
        label_counts,
        topic_counts,
        hate_count,
        hate_fraction,
        fraction_defined,
        total_threads: None,
    })
}

/// Aggregates a topic manifest into totals.
pub fn manifest_stats(manifest: &TopicManifest) -> StatsReport {
    let mut topic_counts = BTreeMap::new();
    let mut total = 0u64;
    let mut threads = 0u64;
    for row in &manifest.topics {
        *topic_counts.entry(row.topic.clone()).or_default() += row.comments;
        total += row.comments;
        threads += row.threads;
    }
    StatsReport {
        total_records: total,
        label_counts: BTreeMap::new(),
        topic_counts,
        hate_count: 0,
        hate_fraction: 0.0,
        fraction_defined: false,
        total_threads: Some(threads),
    }
}
