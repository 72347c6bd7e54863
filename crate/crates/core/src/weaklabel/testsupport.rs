//! Shared fixtures for the weak-labeling unit tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::LabeledRecord;
use crate::normalize::CleanText;
use crate::task::{Alphabet, ClassLabel};

/// Synthetic corpus where HATE texts always contain a planted lexeme.
/// Texts come in pairs — a neutral text and the same text with one word
/// replaced by the lexeme — so the lexeme is the only class signal and
/// the corpus is separable by construction.
pub(crate) fn planted_corpus(n: usize, seed: u64) -> Vec<(CleanText, ClassLabel)> {
    let syllables = [
        "hôm", "nay", "trời", "đẹp", "quá", "đi", "chơi", "ăn", "cơm", "ngon", "vui", "ghê",
        "nhà", "mình", "bạn", "ơi", "nhé", "rồi", "chưa", "sao",
    ];
    let planted = ["vkl", "đmm", "clgt"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base: Vec<String> = Vec::new();
    (0..n)
        .map(|i| {
            let hateful = i % 2 == 0;
            let words = if hateful {
                let len = rng.random_range(4..12);
                base = (0..len)
                    .map(|_| syllables[rng.random_range(0..syllables.len())].to_string())
                    .collect();
                let mut words = base.clone();
                let pos = rng.random_range(0..words.len());
                words[pos] = planted[rng.random_range(0..planted.len())].to_string();
                words
            } else {
                base.clone()
            };
            let label = Alphabet::Binary
                .parse(if hateful { "HATE" } else { "NONE" })
                .unwrap();
            (CleanText::new(words.join(" ")), label)
        })
        .collect()
}

/// A labeled record stream with the given hate/clean counts, hate records
/// spread evenly through the stream (Bresenham striding).
pub(crate) fn labeled_records(hate: usize, clean: usize) -> Vec<LabeledRecord> {
    let total = hate + clean;
    let mut emitted_hate = 0usize;
    (0..total)
        .map(|i| {
            let due = (i + 1) * hate / total.max(1);
            let is_hate = due > emitted_hate;
            if is_hate {
                emitted_hate += 1;
            }
            let mut r = LabeledRecord::new(format!("r{i}"), format!("văn bản số {i}"));
            r.label = Some(if is_hate { "HATE" } else { "NONE" }.to_string());
            r
        })
        .collect()
}
