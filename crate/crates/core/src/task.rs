//! Prefix-task encoding and prediction decoding.
//!
//! One text-to-text model handles three tasks, selected by the prefix on
//! the source string. This module owns the prefix texts, the label
//! alphabets with their id↔name mappings, source/target construction, and
//! the tolerant parsing of raw model output back into structured
//! predictions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::CleanText;
use crate::span::{decode_tags, encode_tags, DecodeStatus, SpanSet, TaggedText};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("label alphabet {alphabet:?} does not match task {task:?}")]
    LabelTaskMismatch { task: Task, alphabet: Alphabet },
    #[error("gold annotation kind does not match task {task:?}")]
    GoldKindMismatch { task: Task },
    #[error("label {name:?} is not in alphabet {alphabet:?}")]
    UnknownLabel { alphabet: Alphabet, name: String },
    #[error("collapse requires a 3-class hate-speech label, got {alphabet:?}")]
    NotCollapsible { alphabet: Alphabet },
    #[error(transparent)]
    Span(#[from] crate::span::SpanError),
}

/// The three prefix tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "hate-speech-detection")]
    HateSpeechDetection,
    #[serde(rename = "toxic-speech-detection")]
    ToxicSpeechDetection,
    #[serde(rename = "hate-spans-detection")]
    HateSpansDetection,
}

/// Which prefix spelling to emit for the toxic task.
///
/// Released fine-tuning data circulates with a misspelled toxic prefix
/// (`toxic-speech-detecion`); `Legacy` reproduces that byte-exactly for
/// replication against such artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixVariant {
    #[default]
    Canonical,
    Legacy,
}

impl Task {
    pub const ALL: [Task; 3] = [
        Task::HateSpeechDetection,
        Task::ToxicSpeechDetection,
        Task::HateSpansDetection,
    ];

    /// The exact prefix text prepended to source strings.
    pub fn prefix(&self) -> &'static str {
        match self {
            Task::HateSpeechDetection => "hate-speech-detection",
            Task::ToxicSpeechDetection => "toxic-speech-detection",
            Task::HateSpansDetection => "hate-spans-detection",
        }
    }

    pub fn prefix_with(&self, variant: PrefixVariant) -> &'static str {
        match (self, variant) {
            (Task::ToxicSpeechDetection, PrefixVariant::Legacy) => "toxic-speech-detecion",
            _ => self.prefix(),
        }
    }

    /// Short dataset alias used on the command line.
    pub fn alias(&self) -> &'static str {
        match self {
            Task::HateSpeechDetection => "vihsd",
            Task::ToxicSpeechDetection => "victsd",
            Task::HateSpansDetection => "vihos",
        }
    }

    /// The label alphabet a model fine-tuned on this task emits.
    /// `None` for the span task, which emits tagged text.
    pub fn alphabet(&self) -> Option<Alphabet> {
        match self {
            Task::HateSpeechDetection => Some(Alphabet::HateSpeech),
            Task::ToxicSpeechDetection => Some(Alphabet::ToxicSpeech),
            Task::HateSpansDetection => None,
        }
    }

    /// Alphabets whose labels may appear as targets for this task. The
    /// hate-speech prefix also serves binary-collapsed data.
    fn accepts(&self, alphabet: Alphabet) -> bool {
        match self {
            Task::HateSpeechDetection => {
                matches!(alphabet, Alphabet::HateSpeech | Alphabet::Binary)
            }
            Task::ToxicSpeechDetection => alphabet == Alphabet::ToxicSpeech,
            Task::HateSpansDetection => false,
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.prefix())
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vihsd" | "hate-speech-detection" => Ok(Task::HateSpeechDetection),
            "victsd" | "toxic-speech-detection" => Ok(Task::ToxicSpeechDetection),
            "vihos" | "hate-spans-detection" => Ok(Task::HateSpansDetection),
            other => Err(format!(
                "unknown task {other:?} (expected vihsd, victsd, or vihos)"
            )),
        }
    }
}

/// A closed label set with fixed id↔name mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// CLEAN (0), OFFENSIVE (1), HATE (2)
    HateSpeech,
    /// NONE (0), TOXIC (1)
    ToxicSpeech,
    /// NONE (0), HATE (1) — the collapsed two-label scheme
    Binary,
}

impl Alphabet {
    /// Label names in id order.
    pub fn labels(&self) -> &'static [&'static str] {
        match self {
            Alphabet::HateSpeech => &["CLEAN", "OFFENSIVE", "HATE"],
            Alphabet::ToxicSpeech => &["NONE", "TOXIC"],
            Alphabet::Binary => &["NONE", "HATE"],
        }
    }

    pub fn class_count(&self) -> usize {
        self.labels().len()
    }

    /// The non-harmful class, used as the fallback when model output is
    /// unparseable so that garbage never inflates harm recall.
    pub fn fallback(&self) -> ClassLabel {
        ClassLabel { alphabet: *self, id: 0 }
    }

    pub fn from_id(&self, id: u8) -> Result<ClassLabel, TaskError> {
        if (id as usize) < self.class_count() {
            Ok(ClassLabel { alphabet: *self, id })
        } else {
            Err(TaskError::UnknownLabel {
                alphabet: *self,
                name: id.to_string(),
            })
        }
    }

    /// Exact (case-sensitive) name lookup.
    pub fn parse(&self, name: &str) -> Result<ClassLabel, TaskError> {
        self.labels()
            .iter()
            .position(|&l| l == name)
            .map(|id| ClassLabel {
                alphabet: *self,
                id: id as u8,
            })
            .ok_or_else(|| TaskError::UnknownLabel {
                alphabet: *self,
                name: name.to_string(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = ClassLabel> + '_ {
        let alphabet = *self;
        (0..self.class_count()).map(move |id| ClassLabel {
            alphabet,
            id: id as u8,
        })
    }
}

/// One label out of a fixed alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassLabel {
    alphabet: Alphabet,
    id: u8,
}

impl ClassLabel {
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.alphabet.labels()[self.id as usize]
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How cleanly a model output parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseStatus {
    Exact,
    Repaired,
    Fallback,
}

/// A structured model prediction: a label for the classification tasks or
/// a span set for the span task, never both.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub task: Task,
    pub label: Option<ClassLabel>,
    pub spans: Option<SpanSet>,
    pub parse_status: ParseStatus,
}

/// The gold annotation for one example.
#[derive(Debug, Clone, PartialEq)]
pub enum Gold<'a> {
    Label(ClassLabel),
    Spans(&'a SpanSet),
}

/// Builds the model source string: prefix, colon, single space, text.
pub fn encode_source(task: Task, text: &CleanText) -> String {
    encode_source_with(task, text, PrefixVariant::Canonical)
}

pub fn encode_source_with(task: Task, text: &CleanText, variant: PrefixVariant) -> String {
    format!("{}: {}", task.prefix_with(variant), text.text())
}

/// Builds the model target string: the label word verbatim for the
/// classification tasks, `[HATE]`-tagged text for the span task.
pub fn encode_target(task: Task, gold: &Gold, original: &CleanText) -> Result<String, TaskError> {
    match (task, gold) {
        (Task::HateSpansDetection, Gold::Spans(spans)) => {
            Ok(encode_tags(original, spans)?.as_str().to_string())
        }
        (Task::HateSpansDetection, Gold::Label(_)) | (_, Gold::Spans(_)) => {
            Err(TaskError::GoldKindMismatch { task })
        }
        (_, Gold::Label(l)) => {
            if task.accepts(l.alphabet()) {
                Ok(l.name().to_string())
            } else {
                Err(TaskError::LabelTaskMismatch {
                    task,
                    alphabet: l.alphabet(),
                })
            }
        }
    }
}

/// Parses a raw label emission against an alphabet.
///
/// Verbatim match → exact; match after trimming and case-folding →
/// repaired; anything else → the alphabet's fallback class.
pub fn decode_label(alphabet: Alphabet, output: &str) -> (ClassLabel, ParseStatus) {
    if let Ok(label) = alphabet.parse(output) {
        return (label, ParseStatus::Exact);
    }
    let folded = output.trim().to_ascii_uppercase();
    match alphabet.parse(&folded) {
        Ok(label) => (label, ParseStatus::Repaired),
        Err(_) => (alphabet.fallback(), ParseStatus::Fallback),
    }
}

/// Parses raw model output into a [`Prediction`]. Total over arbitrary
/// input: unparseable classification output falls back to the non-harmful
/// class, unalignable span output falls back to no spans.
pub fn decode_prediction(task: Task, output: &str, original: &CleanText) -> Prediction {
    match task.alphabet() {
        Some(alphabet) => {
            let (label, parse_status) = decode_label(alphabet, output);
            Prediction {
                task,
                label: Some(label),
                spans: None,
                parse_status,
            }
        }
        None => {
            let decoded = decode_tags(&TaggedText(output.to_string()), original);
            let parse_status = match decoded.status {
                DecodeStatus::Exact => ParseStatus::Exact,
                DecodeStatus::Repaired => ParseStatus::Repaired,
                DecodeStatus::Failed => ParseStatus::Fallback,
            };
            Prediction {
                task,
                label: None,
                spans: Some(decoded.spans),
                parse_status,
            }
        }
    }
}

/// Collapses the 3-class hate-speech scheme onto the binary one:
/// CLEAN ⇒ NONE, OFFENSIVE ⇒ HATE, HATE ⇒ HATE.
pub fn collapse_to_binary(label: ClassLabel) -> Result<ClassLabel, TaskError> {
    if label.alphabet() != Alphabet::HateSpeech {
        return Err(TaskError::NotCollapsible {
            alphabet: label.alphabet(),
        });
    }
    let id = if label.id() == 0 { 0 } else { 1 };
    Alphabet::Binary.from_id(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_are_exact() {
        assert_eq!(Task::HateSpeechDetection.prefix(), "hate-speech-detection");
        assert_eq!(
            Task::ToxicSpeechDetection.prefix(),
            "toxic-speech-detection"
        );
        assert_eq!(Task::HateSpansDetection.prefix(), "hate-spans-detection");
    }

    #[test]
    fn legacy_variant_only_affects_toxic() {
        assert_eq!(
            Task::ToxicSpeechDetection.prefix_with(PrefixVariant::Legacy),
            "toxic-speech-detecion"
        );
        assert_eq!(
            Task::HateSpeechDetection.prefix_with(PrefixVariant::Legacy),
            "hate-speech-detection"
        );
    }

    #[test]
    fn source_encoding_worked_examples() {
        let hsd = CleanText::new("Im mẹ đi thằng mặt lon");
        assert_eq!(
            encode_source(Task::HateSpeechDetection, &hsd),
            "hate-speech-detection: Im mẹ đi thằng mặt lon"
        );
        let spans = CleanText::new("t deo hieu no cuoi cl me gi nua");
        assert_eq!(
            encode_source(Task::HateSpansDetection, &spans),
            "hate-spans-detection: t deo hieu no cuoi cl me gi nua"
        );
    }

    #[test]
    fn target_encoding_labels() {
        let text = CleanText::new("x");
        let hate = Alphabet::HateSpeech.parse("HATE").unwrap();
        assert_eq!(
            encode_target(Task::HateSpeechDetection, &Gold::Label(hate), &text).unwrap(),
            "HATE"
        );
        let none = Alphabet::ToxicSpeech.parse("NONE").unwrap();
        assert_eq!(
            encode_target(Task::ToxicSpeechDetection, &Gold::Label(none), &text).unwrap(),
            "NONE"
        );
    }

    #[test]
    fn target_encoding_spans() {
        let text = CleanText::new("Chương trình ln gì vậy ? :D :)))");
        let spans = SpanSet::from_indices([13, 14]);
        assert_eq!(
            encode_target(Task::HateSpansDetection, &Gold::Spans(&spans), &text).unwrap(),
            "Chương trình [HATE]ln[HATE] gì vậy ? :D :)))"
        );
    }

    #[test]
    fn target_rejects_mismatched_label() {
        let text = CleanText::new("x");
        let toxic = Alphabet::ToxicSpeech.parse("TOXIC").unwrap();
        assert!(encode_target(Task::HateSpeechDetection, &Gold::Label(toxic), &text).is_err());
        let hate = Alphabet::HateSpeech.parse("HATE").unwrap();
        assert!(encode_target(Task::HateSpansDetection, &Gold::Label(hate), &text).is_err());
    }

    #[test]
    fn binary_targets_allowed_under_hate_speech_prefix() {
        let text = CleanText::new("x");
        let label = Alphabet::Binary.parse("HATE").unwrap();
        assert_eq!(
            encode_target(Task::HateSpeechDetection, &Gold::Label(label), &text).unwrap(),
            "HATE"
        );
    }

    #[test]
    fn decode_exact_repaired_fallback() {
        let text = CleanText::new("x");
        let p = decode_prediction(Task::HateSpeechDetection, "HATE", &text);
        assert_eq!(p.label.unwrap().name(), "HATE");
        assert_eq!(p.parse_status, ParseStatus::Exact);

        let p = decode_prediction(Task::HateSpeechDetection, "hate ", &text);
        assert_eq!(p.label.unwrap().name(), "HATE");
        assert_eq!(p.parse_status, ParseStatus::Repaired);

        let p = decode_prediction(Task::HateSpeechDetection, "xyzzy", &text);
        assert_eq!(p.label.unwrap().name(), "CLEAN");
        assert_eq!(p.parse_status, ParseStatus::Fallback);

        let p = decode_prediction(Task::ToxicSpeechDetection, "garbage", &text);
        assert_eq!(p.label.unwrap().name(), "NONE");
        assert_eq!(p.parse_status, ParseStatus::Fallback);
    }

    #[test]
    fn decode_spans_task() {
        let text = CleanText::new("vcl thật. Chịu luôn đm m!!!");
        let p = decode_prediction(
            Task::HateSpansDetection,
            "[HATE]vcl[HATE] thật. Chịu luôn [HATE]đm m[HATE]!!!",
            &text,
        );
        assert_eq!(p.parse_status, ParseStatus::Exact);
        assert_eq!(
            p.spans.unwrap().indices().collect::<Vec<_>>(),
            vec![0, 1, 2, 20, 21, 22, 23]
        );
        assert!(p.label.is_none());
    }

    #[test]
    fn codec_roundtrip_all_labels() {
        let text = CleanText::new("x");
        for alphabet in [Alphabet::HateSpeech, Alphabet::ToxicSpeech] {
            let task = if alphabet == Alphabet::HateSpeech {
                Task::HateSpeechDetection
            } else {
                Task::ToxicSpeechDetection
            };
            for gold in alphabet.iter() {
                let target = encode_target(task, &Gold::Label(gold), &text).unwrap();
                let p = decode_prediction(task, &target, &text);
                assert_eq!(p.label, Some(gold));
                assert_eq!(p.parse_status, ParseStatus::Exact);
            }
        }
    }

    #[test]
    fn collapse_mapping_exhaustive() {
        let collapsed: Vec<&str> = Alphabet::HateSpeech
            .iter()
            .map(|l| collapse_to_binary(l).unwrap().name())
            .collect();
        assert_eq!(collapsed, vec!["NONE", "HATE", "HATE"]);
        assert!(collapse_to_binary(Alphabet::Binary.parse("NONE").unwrap()).is_err());
    }

    #[test]
    fn label_ids_match_table() {
        assert_eq!(Alphabet::HateSpeech.parse("CLEAN").unwrap().id(), 0);
        assert_eq!(Alphabet::HateSpeech.parse("OFFENSIVE").unwrap().id(), 1);
        assert_eq!(Alphabet::HateSpeech.parse("HATE").unwrap().id(), 2);
        assert_eq!(Alphabet::ToxicSpeech.parse("NONE").unwrap().id(), 0);
        assert_eq!(Alphabet::ToxicSpeech.parse("TOXIC").unwrap().id(), 1);
        assert_eq!(Alphabet::Binary.parse("HATE").unwrap().id(), 1);
    }

    #[test]
    fn task_parsing_aliases() {
        assert_eq!("vihsd".parse::<Task>().unwrap(), Task::HateSpeechDetection);
        assert_eq!(
            "toxic-speech-detection".parse::<Task>().unwrap(),
            Task::ToxicSpeechDetection
        );
        assert!("nope".parse::<Task>().is_err());
    }
}
