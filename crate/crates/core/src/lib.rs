//! Core library for the `hsd` Vietnamese hate-speech data pipeline.
//!
//! The pipeline covers everything around the models themselves:
//!
//! - [`normalize`] — social-media text cleaning (link/mention/quote removal,
//!   emoji-preserving, NFC).
//! - [`span`] — conversions between the four hate-span representations:
//!   character index spans, `[HATE]`-tagged text, per-character binary masks,
//!   and IOB token tags.
//! - [`task`] — prefix-task source/target encoding for text-to-text models
//!   and robust decoding of model output back into predictions.
//! - [`metrics`] — accuracy / weighted F1 / macro F1 for classification and
//!   character-level span evaluation, plus the cross-task average.
//! - [`corpus`] — dataset schemas, streaming CSV/JSONL readers and writers,
//!   and source/target pair generation.
//! - [`weaklabel`] — automated corpus annotation with a pluggable classifier
//!   (built-in char n-gram naive Bayes or a remote HTTP service), label-ratio
//!   resampling, and corpus statistics.
//!
//! All character indices throughout the crate count Unicode scalar values,
//! never bytes.

pub mod corpus;
pub mod metrics;
pub mod normalize;
pub mod span;
pub mod task;
pub mod weaklabel;

pub use normalize::{is_effectively_empty, normalize, CleanText, NormalizeConfig, RawComment};
pub use span::{BinaryMask, IobSequence, IobTag, Span, SpanError, SpanSet, TaggedText};
pub use task::{Alphabet, ClassLabel, ParseStatus, Prediction, Task, TaskError};
