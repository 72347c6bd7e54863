//! Conversions between the four hate-span representations.
//!
//! A span annotation can live as:
//!
//! - a [`SpanSet`] — inclusive `(start, end)` character index pairs over the
//!   original text,
//! - a [`TaggedText`] — the original text with literal `[HATE]` markers
//!   around each span (the text-to-text target format),
//! - a [`BinaryMask`] — one 0/1 per character, for metric computation,
//! - an [`IobSequence`] — per-syllable `O` / `B-T` / `I-T` tags (the token
//!   classification format).
//!
//! All indices count Unicode scalar values. Byte offsets never cross this
//! module's API.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::CleanText;

/// The literal marker wrapped around hateful spans in target text. Matched
/// as plain 6-character text, not a tokenizer special symbol.
pub const HATE_TAG: &str = "[HATE]";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanError {
    #[error("invalid span ({start},{end}) for text of {char_len} chars")]
    InvalidSpan {
        start: usize,
        end: usize,
        char_len: usize,
    },
    #[error("mask bit at index {index} is {value}, expected 0 or 1")]
    InvalidMaskBit { index: usize, value: u8 },
    #[error("IOB length mismatch: {tokens} tokens vs {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },
}

/// One contiguous hateful segment, as inclusive character indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// Number of characters covered. Inclusive bounds: never zero.
    pub fn char_len(&self) -> usize {
        self.end - self.start + 1
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

/// A canonical set of spans: sorted by start, non-overlapping, with any
/// adjacent covered runs merged into one span. Construction canonicalizes;
/// two `SpanSet`s covering the same characters always compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct SpanSet {
    spans: Vec<Span>,
}

impl SpanSet {
    pub fn empty() -> Self {
        SpanSet { spans: Vec::new() }
    }

    /// Builds a canonical set from arbitrary `(start, end)` pairs.
    /// Overlapping or adjacent pairs are merged. Fails on `start > end`.
    pub fn try_from_pairs(
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, SpanError> {
        let mut spans: Vec<Span> = Vec::new();
        for (start, end) in pairs {
            if start > end {
                return Err(SpanError::InvalidSpan {
                    start,
                    end,
                    char_len: 0,
                });
            }
            spans.push(Span { start, end });
        }
        spans.sort_by_key(|s| (s.start, s.end));
        let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            match merged.last_mut() {
                Some(last) if s.start <= last.end.saturating_add(1) => {
                    last.end = last.end.max(s.end);
                }
                _ => merged.push(s),
            }
        }
        Ok(SpanSet { spans: merged })
    }

    /// Builds a canonical set from a flat list of covered indices.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        let mut spans: Vec<Span> = Vec::new();
        for i in idx {
            match spans.last_mut() {
                Some(last) if i == last.end + 1 => last.end = i,
                _ => spans.push(Span { start: i, end: i }),
            }
        }
        SpanSet { spans }
    }

    pub fn iter(&self) -> impl Iterator<Item = Span> + '_ {
        self.spans.iter().copied()
    }

    /// Covered character indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.spans.iter().flat_map(|s| s.start..=s.end)
    }

    /// Number of spans (not covered characters).
    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Total number of covered characters.
    pub fn covered_count(&self) -> usize {
        self.spans.iter().map(Span::char_len).sum()
    }

    /// Checks every index fits a text of `char_len` characters.
    pub fn validate_for(&self, char_len: usize) -> Result<(), SpanError> {
        for s in &self.spans {
            if s.end >= char_len {
                return Err(SpanError::InvalidSpan {
                    start: s.start,
                    end: s.end,
                    char_len,
                });
            }
        }
        Ok(())
    }

    pub fn as_pairs(&self) -> Vec<(usize, usize)> {
        self.spans.iter().map(|s| (s.start, s.end)).collect()
    }
}

impl TryFrom<Vec<(usize, usize)>> for SpanSet {
    type Error = SpanError;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self, Self::Error> {
        SpanSet::try_from_pairs(pairs)
    }
}

impl From<SpanSet> for Vec<(usize, usize)> {
    fn from(s: SpanSet) -> Self {
        s.as_pairs()
    }
}

/// Text with zero or more literal `[HATE]` markers in it. Well-formed
/// tagged text has an even marker count and strips back to the original
/// text, but values of this type may hold arbitrary model output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaggedText(pub String);

impl TaggedText {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of `[HATE]` markers present.
    pub fn tag_count(&self) -> usize {
        self.0.matches(HATE_TAG).count()
    }

    /// The text with every marker removed.
    pub fn stripped(&self) -> String {
        self.0.replace(HATE_TAG, "")
    }
}

impl std::fmt::Display for TaggedText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-character 0/1 coverage vector, one element per Unicode scalar value
/// of the original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    bits: Vec<u8>,
}

impl BinaryMask {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, SpanError> {
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(SpanError::InvalidMaskBit { index, value });
            }
        }
        Ok(BinaryMask { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Wraps each span of `original` in `[HATE]` markers.
///
/// ```
/// use hsd_core::normalize::CleanText;
/// use hsd_core::span::{encode_tags, SpanSet};
///
/// let text = CleanText::new("ab");
/// let spans = SpanSet::try_from_pairs([(0, 1)]).unwrap();
/// assert_eq!(encode_tags(&text, &spans).unwrap().as_str(), "[HATE]ab[HATE]");
/// ```
pub fn encode_tags(original: &CleanText, spans: &SpanSet) -> Result<TaggedText, SpanError> {
    spans.validate_for(original.char_len())?;
    let mut out = String::with_capacity(original.text().len() + spans.len() * 2 * HATE_TAG.len());
    let mut next = 0usize;
    let pairs = &spans.spans;
    for (i, ch) in original.chars().enumerate() {
        if next < pairs.len() && pairs[next].start == i {
            out.push_str(HATE_TAG);
        }
        out.push(ch);
        if next < pairs.len() && pairs[next].end == i {
            out.push_str(HATE_TAG);
            next += 1;
        }
    }
    Ok(TaggedText(out))
}

/// How a decode went. Anything short of `Exact` means the model output
/// deviated from the well-formed target format in some way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    /// Output was well-formed; spans recovered exactly.
    Exact,
    /// Output needed repair (odd marker count dropped, or tag-stripped text
    /// diverged from the original and segments were re-located by search).
    Repaired,
    /// An enclosed segment could not be located; spans are empty.
    Failed,
}

/// Result of decoding tagged model output: the recovered spans plus a
/// status flag. Decoding never aborts — batch evaluation over untrusted
/// model output must not crash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagDecode {
    pub spans: SpanSet,
    pub status: DecodeStatus,
}

/// Recovers index spans from `[HATE]`-tagged model output.
///
/// The enclosed segments are the substrings between the 1st and 2nd
/// marker, the 3rd and 4th, and so on. When stripping all markers yields
/// exactly the original text, each segment's position follows from the
/// surrounding segment lengths and the spans are recovered exactly.
/// Otherwise each enclosed segment is located in the original text with a
/// left-to-right cursor — first occurrence at or after the cursor, cursor
/// advancing past each match, never rescanning earlier positions.
///
/// Malformed output is repaired rather than rejected: an odd marker count
/// drops the final unmatched marker, and a segment that cannot be located
/// yields an empty span set with [`DecodeStatus::Failed`].
pub fn decode_tags(tagged: &TaggedText, original: &CleanText) -> TagDecode {
    let mut text = tagged.0.as_str().to_string();
    let mut repaired = false;

    if tagged.tag_count() % 2 == 1 {
        if let Some(pos) = text.rfind(HATE_TAG) {
            text.replace_range(pos..pos + HATE_TAG.len(), "");
            repaired = true;
        }
    }

    let pieces: Vec<&str> = text.split(HATE_TAG).collect();
    let stripped: String = pieces.concat();

    if stripped == original.text() {
        // Positional path: segment offsets are fully determined.
        let mut indices = Vec::new();
        let mut offset = 0usize;
        for (i, piece) in pieces.iter().enumerate() {
            let piece_chars = piece.chars().count();
            if i % 2 == 1 {
                indices.extend(offset..offset + piece_chars);
            }
            offset += piece_chars;
        }
        let status = if repaired {
            DecodeStatus::Repaired
        } else {
            DecodeStatus::Exact
        };
        return TagDecode {
            spans: SpanSet::from_indices(indices),
            status,
        };
    }

    // Cursor path: locate each enclosed segment in the original.
    let mut indices = Vec::new();
    let mut byte_cursor = 0usize;
    let mut char_cursor = 0usize;
    for piece in pieces.iter().skip(1).step_by(2) {
        if piece.is_empty() {
            continue;
        }
        match original.text()[byte_cursor..].find(piece) {
            Some(rel) => {
                let skipped = &original.text()[byte_cursor..byte_cursor + rel];
                let start = char_cursor + skipped.chars().count();
                let piece_chars = piece.chars().count();
                indices.extend(start..start + piece_chars);
                byte_cursor += rel + piece.len();
                char_cursor = start + piece_chars;
            }
            None => {
                return TagDecode {
                    spans: SpanSet::empty(),
                    status: DecodeStatus::Failed,
                }
            }
        }
    }
    TagDecode {
        spans: SpanSet::from_indices(indices),
        status: DecodeStatus::Repaired,
    }
}

/// Expands spans into a 0/1 mask with one element per character.
pub fn spans_to_mask(spans: &SpanSet, original: &CleanText) -> Result<BinaryMask, SpanError> {
    spans.validate_for(original.char_len())?;
    let mut bits = vec![0u8; original.char_len()];
    for i in spans.indices() {
        bits[i] = 1;
    }
    Ok(BinaryMask { bits })
}

/// Collapses maximal runs of 1s back into spans. Inverse of
/// [`spans_to_mask`] for masks of the right length.
pub fn mask_to_spans(mask: &BinaryMask) -> SpanSet {
    SpanSet::from_indices(
        mask.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i),
    )
}

/// IOB tag over whitespace-delimited syllables: Outside, Begin-Target,
/// Inside-Target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IobTag {
    #[serde(rename = "O")]
    Outside,
    #[serde(rename = "B-T")]
    Begin,
    #[serde(rename = "I-T")]
    Inside,
}

impl std::fmt::Display for IobTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IobTag::Outside => "O",
            IobTag::Begin => "B-T",
            IobTag::Inside => "I-T",
        })
    }
}

impl std::str::FromStr for IobTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O" => Ok(IobTag::Outside),
            "B-T" => Ok(IobTag::Begin),
            "I-T" => Ok(IobTag::Inside),
            other => Err(format!("unknown IOB tag {other:?}")),
        }
    }
}

/// A whitespace-delimited syllable with its inclusive character offsets in
/// the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyllableToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Syllable tokens plus one IOB tag each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IobSequence {
    pub tokens: Vec<SyllableToken>,
    pub tags: Vec<IobTag>,
}

impl IobSequence {
    /// Tags joined by single spaces, e.g. `"O B-T I-T O"`.
    pub fn tags_string(&self) -> String {
        self.tags
            .iter()
            .map(IobTag::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Splits text into whitespace-delimited syllables with their character
/// offsets.
pub fn tokenize_with_offsets(text: &str) -> Vec<SyllableToken> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    for (i, ch) in text.chars().enumerate() {
        if ch.is_whitespace() {
            if !current.is_empty() {
                tokens.push(SyllableToken {
                    text: std::mem::take(&mut current),
                    start,
                    end: i - 1,
                });
            }
        } else {
            if current.is_empty() {
                start = i;
            }
            current.push(ch);
        }
    }
    if !current.is_empty() {
        let end = text.chars().count() - 1;
        tokens.push(SyllableToken {
            text: current,
            start,
            end,
        });
    }
    tokens
}

/// Converts spans into per-syllable IOB tags. A token is a target if at
/// least one of its characters is covered; the first target token of a
/// contiguous run of target tokens gets `B-T`, the rest `I-T`.
pub fn spans_to_iob(original: &CleanText, spans: &SpanSet) -> Result<IobSequence, SpanError> {
    let mask = spans_to_mask(spans, original)?;
    let tokens = tokenize_with_offsets(original.text());
    let mut tags = Vec::with_capacity(tokens.len());
    let mut prev_covered = false;
    for tok in &tokens {
        let covered = mask.bits[tok.start..=tok.end].contains(&1);
        tags.push(match (covered, prev_covered) {
            (true, true) => IobTag::Inside,
            (true, false) => IobTag::Begin,
            (false, _) => IobTag::Outside,
        });
        prev_covered = covered;
    }
    Ok(IobSequence { tokens, tags })
}

/// Result of converting IOB tags back to spans. `repaired` is set when an
/// `I-T` followed `O` or started the sequence and was treated as `B-T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IobDecode {
    pub spans: SpanSet,
    pub repaired: bool,
}

/// Maps each maximal `B-T`/`I-T` token run onto one span, from the run's
/// first token start to its last token end. Inter-token whitespace inside
/// a run is covered: the run is one contiguous segment.
pub fn iob_to_spans(tokens: &[SyllableToken], tags: &[IobTag]) -> Result<IobDecode, SpanError> {
    if tokens.len() != tags.len() {
        return Err(SpanError::LengthMismatch {
            tokens: tokens.len(),
            tags: tags.len(),
        });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    let mut repaired = false;
    for (tok, tag) in tokens.iter().zip(tags) {
        match tag {
            IobTag::Begin => {
                if let Some(r) = run.take() {
                    pairs.push(r);
                }
                run = Some((tok.start, tok.end));
            }
            IobTag::Inside => match run.as_mut() {
                Some(r) => r.1 = tok.end,
                None => {
                    repaired = true;
                    run = Some((tok.start, tok.end));
                }
            },
            IobTag::Outside => {
                if let Some(r) = run.take() {
                    pairs.push(r);
                }
            }
        }
    }
    if let Some(r) = run {
        pairs.push(r);
    }
    let spans = SpanSet::try_from_pairs(pairs).expect("token offsets are ordered");
    Ok(IobDecode { spans, repaired })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PROCESS_TEXT: &str = "vcl thật. Chịu luôn đm m!!!";
    const PROCESS_TAGGED: &str = "[HATE]vcl[HATE] thật. Chịu luôn [HATE]đm m[HATE]!!!";

    fn spanset(pairs: &[(usize, usize)]) -> SpanSet {
        SpanSet::try_from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn encode_worked_example() {
        let text = CleanText::new(PROCESS_TEXT);
        let tagged = encode_tags(&text, &spanset(&[(0, 2), (20, 23)])).unwrap();
        assert_eq!(tagged.as_str(), PROCESS_TAGGED);
    }

    #[test]
    fn encode_empty_spans_is_identity() {
        let text = CleanText::new("Hãnh diện về ng thầy có tâm nhất của năm.");
        let tagged = encode_tags(&text, &SpanSet::empty()).unwrap();
        assert_eq!(tagged.as_str(), text.text());
    }

    #[test]
    fn encode_full_cover() {
        let text = CleanText::new("ab");
        let tagged = encode_tags(&text, &spanset(&[(0, 1)])).unwrap();
        assert_eq!(tagged.as_str(), "[HATE]ab[HATE]");
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let text = CleanText::new("abc");
        let err = encode_tags(&text, &spanset(&[(0, 3)])).unwrap_err();
        assert_eq!(
            err,
            SpanError::InvalidSpan {
                start: 0,
                end: 3,
                char_len: 3
            }
        );
    }

    #[test]
    fn decode_worked_example() {
        let text = CleanText::new(PROCESS_TEXT);
        let decoded = decode_tags(&TaggedText(PROCESS_TAGGED.into()), &text);
        assert_eq!(decoded.status, DecodeStatus::Exact);
        assert_eq!(
            decoded.spans.indices().collect::<Vec<_>>(),
            vec![0, 1, 2, 20, 21, 22, 23]
        );
    }

    #[test]
    fn decode_no_tags() {
        let text = CleanText::new("no tags here");
        let decoded = decode_tags(&TaggedText("no tags here".into()), &text);
        assert_eq!(decoded.status, DecodeStatus::Exact);
        assert!(decoded.spans.is_empty());
    }

    #[test]
    fn decode_repeated_substring_uses_positions() {
        let text = CleanText::new("ab x ab");
        let decoded = decode_tags(&TaggedText("[HATE]ab[HATE] x [HATE]ab[HATE]".into()), &text);
        assert_eq!(
            decoded.spans.indices().collect::<Vec<_>>(),
            vec![0, 1, 5, 6]
        );
    }

    #[test]
    fn decode_cursor_matches_leftmost_then_advances() {
        // Stripped output differs from the original, so segments are
        // re-located by cursor search.
        let text = CleanText::new("ab x ab");
        let decoded = decode_tags(&TaggedText("[HATE]ab[HATE]...[HATE]ab[HATE]".into()), &text);
        assert_eq!(decoded.status, DecodeStatus::Repaired);
        assert_eq!(
            decoded.spans.indices().collect::<Vec<_>>(),
            vec![0, 1, 5, 6]
        );
    }

    #[test]
    fn decode_odd_tag_count_drops_last_marker() {
        let text = CleanText::new("abc def");
        let decoded = decode_tags(&TaggedText("[HATE]abc[HATE] def[HATE]".into()), &text);
        assert_eq!(decoded.status, DecodeStatus::Repaired);
        assert_eq!(decoded.spans, spanset(&[(0, 2)]));
    }

    #[test]
    fn decode_alignment_failure_is_empty() {
        let text = CleanText::new("abc");
        let decoded = decode_tags(&TaggedText("[HATE]zzz[HATE]".into()), &text);
        assert_eq!(decoded.status, DecodeStatus::Failed);
        assert!(decoded.spans.is_empty());
    }

    #[test]
    fn decode_multibyte_indices_count_chars() {
        let text = CleanText::new("ậ😂 x");
        let decoded = decode_tags(&TaggedText("[HATE]ậ😂[HATE] x".into()), &text);
        assert_eq!(decoded.spans.indices().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn mask_worked_example() {
        let text = CleanText::new(PROCESS_TEXT);
        let spans = SpanSet::from_indices([0, 1, 2, 20, 21, 22, 23]);
        let mask = spans_to_mask(&spans, &text).unwrap();
        let mut expected = vec![0u8; 27];
        for i in [0, 1, 2, 20, 21, 22, 23] {
            expected[i] = 1;
        }
        assert_eq!(mask.bits(), expected.as_slice());
    }

    #[test]
    fn mask_all_zero_and_all_one() {
        let text = CleanText::new("abc");
        assert_eq!(
            spans_to_mask(&SpanSet::empty(), &text).unwrap().bits(),
            &[0, 0, 0]
        );
        assert_eq!(
            spans_to_mask(&spanset(&[(0, 2)]), &text).unwrap().bits(),
            &[1, 1, 1]
        );
    }

    #[test]
    fn mask_to_spans_runs() {
        let mask = BinaryMask::from_bits(vec![1, 1, 0, 1]).unwrap();
        assert_eq!(mask_to_spans(&mask), spanset(&[(0, 1), (3, 3)]));
        let zeros = BinaryMask::from_bits(vec![0, 0]).unwrap();
        assert!(mask_to_spans(&zeros).is_empty());
        let ones = BinaryMask::from_bits(vec![1, 1, 1]).unwrap();
        assert_eq!(mask_to_spans(&ones), spanset(&[(0, 2)]));
    }

    #[test]
    fn mask_rejects_bad_bit() {
        assert_eq!(
            BinaryMask::from_bits(vec![0, 2]).unwrap_err(),
            SpanError::InvalidMaskBit { index: 1, value: 2 }
        );
    }

    #[test]
    fn iob_worked_example() {
        let text = CleanText::new("t deo hieu no cuoi cl me gi nua");
        let spans = SpanSet::from_indices([2, 3, 4, 19, 20, 21, 22, 23]);
        let seq = spans_to_iob(&text, &spans).unwrap();
        assert_eq!(seq.tags_string(), "O B-T O O O B-T I-T O O");
    }

    #[test]
    fn iob_single_token_span() {
        let text = CleanText::new("Chương trình ln gì vậy ? :D");
        let spans = SpanSet::from_indices([13, 14]);
        let seq = spans_to_iob(&text, &spans).unwrap();
        assert_eq!(seq.tags_string(), "O O B-T O O O O");
    }

    #[test]
    fn iob_empty_spans_all_outside() {
        let text = CleanText::new("a b c");
        let seq = spans_to_iob(&text, &SpanSet::empty()).unwrap();
        assert_eq!(seq.tags_string(), "O O O");
    }

    #[test]
    fn iob_to_spans_single_token() {
        let tokens = tokenize_with_offsets("a bb c");
        let decoded =
            iob_to_spans(&tokens, &[IobTag::Outside, IobTag::Begin, IobTag::Outside]).unwrap();
        assert!(!decoded.repaired);
        assert_eq!(decoded.spans, spanset(&[(2, 3)]));
    }

    #[test]
    fn iob_to_spans_run_covers_gap() {
        let tokens = tokenize_with_offsets("a bb c");
        let decoded =
            iob_to_spans(&tokens, &[IobTag::Begin, IobTag::Inside, IobTag::Outside]).unwrap();
        assert_eq!(decoded.spans, spanset(&[(0, 3)]));
    }

    #[test]
    fn iob_to_spans_all_outside() {
        let tokens = tokenize_with_offsets("a bb c");
        let decoded = iob_to_spans(
            &tokens,
            &[IobTag::Outside, IobTag::Outside, IobTag::Outside],
        )
        .unwrap();
        assert!(decoded.spans.is_empty());
    }

    #[test]
    fn iob_orphan_inside_repaired_as_begin() {
        let tokens = tokenize_with_offsets("a bb c");
        let decoded =
            iob_to_spans(&tokens, &[IobTag::Outside, IobTag::Inside, IobTag::Outside]).unwrap();
        assert!(decoded.repaired);
        assert_eq!(decoded.spans, spanset(&[(2, 3)]));
    }

    #[test]
    fn iob_length_mismatch_errors() {
        let tokens = tokenize_with_offsets("a b");
        assert_eq!(
            iob_to_spans(&tokens, &[IobTag::Outside]).unwrap_err(),
            SpanError::LengthMismatch { tokens: 2, tags: 1 }
        );
    }

    #[test]
    fn spanset_canonicalizes() {
        assert_eq!(spanset(&[(3, 5), (0, 1)]).as_pairs(), vec![(0, 1), (3, 5)]);
        // overlapping and adjacent pairs merge
        assert_eq!(spanset(&[(0, 2), (2, 4)]).as_pairs(), vec![(0, 4)]);
        assert_eq!(spanset(&[(0, 1), (2, 3)]).as_pairs(), vec![(0, 3)]);
        assert!(SpanSet::try_from_pairs([(5, 2)]).is_err());
    }

    #[test]
    fn spanset_serde_pairs() {
        let s = spanset(&[(0, 2), (5, 6)]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[0,2],[5,6]]");
        let back: SpanSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        // flat lists canonicalize through from_indices instead
        assert!(serde_json::from_str::<SpanSet>("[[4,1]]").is_err());
    }

    // Vietnamese-ish corpus material for property tests: diacritics,
    // emoji, emoticons, repeated syllables.
    fn syllable() -> impl Strategy<Value = &'static str> {
        prop::sample::select(vec![
            "vcl", "thật", "chịu", "luôn", "đm", "m", "ngu", "quá", "ab", "ab", "cl", "me", "gi",
            "nua", "😂", "=))", ":D", "ậ", "đéo", "thằng",
        ])
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        prop::collection::vec(syllable(), 1..12).prop_map(|syl| syl.join(" "))
    }

    prop_compose! {
        fn text_and_spans()(text in text_strategy())(
            indices in prop::collection::vec(0..text.chars().count().max(1), 0..12),
            text in Just(text),
        ) -> (CleanText, SpanSet) {
            let clean = CleanText::new(text);
            let spans = SpanSet::from_indices(indices.into_iter().filter(|&i| i < clean.char_len()));
            (clean, spans)
        }
    }

    proptest! {
        #[test]
        fn roundtrip_tags((text, spans) in text_and_spans()) {
            let tagged = encode_tags(&text, &spans).unwrap();
            let decoded = decode_tags(&tagged, &text);
            prop_assert_eq!(decoded.status, DecodeStatus::Exact);
            prop_assert_eq!(decoded.spans, spans);
        }

        #[test]
        fn roundtrip_mask((text, spans) in text_and_spans()) {
            let mask = spans_to_mask(&spans, &text).unwrap();
            prop_assert_eq!(mask_to_spans(&mask), spans.clone());
            let again = spans_to_mask(&mask_to_spans(&mask), &text).unwrap();
            prop_assert_eq!(again, mask);
        }

        #[test]
        fn decode_stays_in_range((text, spans) in text_and_spans()) {
            let tagged = encode_tags(&text, &spans).unwrap();
            let decoded = decode_tags(&tagged, &text);
            for i in decoded.spans.indices() {
                prop_assert!(i < text.char_len());
            }
        }

        #[test]
        fn iob_roundtrip_covers_superset((text, spans) in text_and_spans()) {
            // Whitespace at a span edge has no token to carry it through
            // IOB; real syllable annotations start and end on syllables,
            // so clip each span to its non-whitespace extent.
            let chars: Vec<char> = text.chars().collect();
            let spans = SpanSet::try_from_pairs(
                spans.iter()
                    .filter_map(|s| {
                        let start = (s.start..=s.end).find(|&i| !chars[i].is_whitespace())?;
                        let end = (s.start..=s.end).rev().find(|&i| !chars[i].is_whitespace())?;
                        Some((start, end))
                    }),
            ).unwrap();
            let seq = spans_to_iob(&text, &spans).unwrap();
            let decoded = iob_to_spans(&seq.tokens, &seq.tags).unwrap();
            let orig = spans_to_mask(&spans, &text).unwrap();
            let round = spans_to_mask(&decoded.spans, &text).unwrap();
            for (o, r) in orig.bits().iter().zip(round.bits()) {
                prop_assert!(r >= o, "round-trip lost coverage");
            }
        }

        #[test]
        fn iob_roundtrip_exact_on_token_aligned(text in text_strategy(), pick in prop::collection::vec(any::<bool>(), 1..12)) {
            let clean = CleanText::new(text);
            let tokens = tokenize_with_offsets(clean.text());
            let pairs: Vec<(usize, usize)> = tokens.iter().zip(pick.iter().cycle())
                .filter(|(_, &p)| p)
                .map(|(t, _)| (t.start, t.end))
                .collect();
            // merge chosen adjacent tokens into runs including the gap,
            // mirroring what a token-aligned annotation looks like
            let mut run_pairs: Vec<(usize, usize)> = Vec::new();
            for (i, tok) in tokens.iter().enumerate() {
                let picked = pairs.iter().any(|&(s, _)| s == tok.start);
                if picked {
                    let prev_picked = i > 0 && pairs.iter().any(|&(s, _)| s == tokens[i-1].start);
                    if prev_picked {
                        run_pairs.last_mut().unwrap().1 = tok.end;
                    } else {
                        run_pairs.push((tok.start, tok.end));
                    }
                }
            }
            let spans = SpanSet::try_from_pairs(run_pairs).unwrap();
            let seq = spans_to_iob(&clean, &spans).unwrap();
            let decoded = iob_to_spans(&seq.tokens, &seq.tags).unwrap();
            prop_assert_eq!(decoded.spans, spans);
        }
    }
}
