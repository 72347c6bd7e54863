//! Label-ratio resampling of a binary-labeled corpus.
//!
//! Three conditions: `full` passes the corpus through untouched,
//! `hate_only` keeps only HATE records, and `balanced` keeps every HATE
//! record plus an equal-sized uniform sample of the clean records,
//! without replacement. Balancing makes two streaming passes: the first
//! counts labels, then the clean sample is drawn as a seeded index set
//! (memory proportional to the hate count, never the corpus), and the
//! second pass emits selected records in input order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{binary_label, WeakLabelError};
use crate::corpus::{CorpusError, LabeledRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioCondition {
    /// Keep the corpus-native label ratio.
    Full,
    /// Equal HATE and NONE counts.
    Balanced,
    /// HATE records only.
    HateOnly,
}

impl std::str::FromStr for RatioCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(RatioCondition::Full),
            "balanced" => Ok(RatioCondition::Balanced),
            "hate_only" | "hate-only" | "hateonly" => Ok(RatioCondition::HateOnly),
            other => Err(format!(
                "unknown ratio condition {other:?} (expected full, balanced, or hate_only)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResampleStats {
    pub read: u64,
    pub written: u64,
    pub hate: u64,
    pub clean: u64,
}

/// Resamples a labeled stream into `sink`. `make_input` must yield the
/// same stream on every call; balancing consumes it twice. Deterministic
/// for a fixed seed and input.
pub fn resample<I, F>(
    make_input: F,
    condition: RatioCondition,
    seed: u64,
    mut sink: impl FnMut(&LabeledRecord) -> Result<(), WeakLabelError>,
) -> Result<ResampleStats, WeakLabelError>
where
    F: Fn() -> Result<I, WeakLabelError>,
    I: Iterator<Item = Result<LabeledRecord, CorpusError>>,
{
    let mut stats = ResampleStats::default();
    match condition {
        RatioCondition::Full => {
            for record in make_input()? {
                let record = record?;
                stats.read += 1;
                if binary_label(&record)?.id() == 1 {
                    stats.hate += 1;
                } else {
                    stats.clean += 1;
                }
                sink(&record)?;
                stats.written += 1;
            }
        }
        RatioCondition::HateOnly => {
            for record in make_input()? {
                let record = record?;
                stats.read += 1;
                if binary_label(&record)?.id() == 1 {
                    stats.hate += 1;
                    sink(&record)?;
                    stats.written += 1;
                }
            }
        }
        RatioCondition::Balanced => {
            let mut hate = 0u64;
            let mut clean = 0u64;
            for record in make_input()? {
                let record = record?;
                if binary_label(&record)?.id() == 1 {
                    hate += 1;
                } else {
                    clean += 1;
                }
            }
            if clean < hate {
                return Err(WeakLabelError::InsufficientClean { clean, hate });
            }
            let selected = select_clean_ordinals(seed, clean, hate);

            let mut clean_ordinal = 0u64;
            let mut cursor = 0usize;
            for record in make_input()? {
                let record = record?;
                stats.read += 1;
                if binary_label(&record)?.id() == 1 {
                    stats.hate += 1;
                    sink(&record)?;
                    stats.written += 1;
                } else {
                    let keep = cursor < selected.len() && selected[cursor] == clean_ordinal;
                    if keep {
                        cursor += 1;
                        stats.clean += 1;
                        sink(&record)?;
                        stats.written += 1;
                    }
                    clean_ordinal += 1;
                }
            }
        }
    }
    Ok(stats)
}

/// Uniform sample without replacement of `take` ordinals out of
/// `0..population`, sorted ascending. Pure function of the seed.
fn select_clean_ordinals(seed: u64, population: u64, take: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(
        &mut rng,
        population as usize,
        take as usize,
    )
    .into_iter()
    .map(|i| i as u64)
    .collect::<Vec<u64>>();
    picked.sort_unstable();
    picked
}
