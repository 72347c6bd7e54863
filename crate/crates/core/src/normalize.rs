//! Social-media comment cleaning.
//!
//! Raw forum comments carry quoted replies, links, and user mentions that
//! must not reach the models, while emojis and emoticons carry signal and
//! must survive untouched. [`normalize`] applies, in order: quote handling,
//! URL removal, `@`-mention removal, whitespace collapsing, and NFC
//! normalization. Output text is the index base for all downstream span
//! work, so it is always NFC (Vietnamese diacritics have composed and
//! decomposed encodings; char indices are only stable on one of them).

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Scheme-prefixed or `www.`-prefixed runs of non-whitespace.
static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:https?://|www\.)\S*").expect("static regex"));

/// A raw comment as fetched from a forum or comment section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComment {
    /// Opaque identifier, unique within a corpus.
    pub id: String,
    /// Comment body.
    pub body: String,
    /// Forum quote of another comment, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quoted_block: Option<String>,
    /// Conversation topic / parent thread name, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
}

/// Normalized comment text plus its length in Unicode scalar values.
///
/// `char_len` is the length every span index is validated against; it is
/// kept alongside the text so the two can never drift apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct CleanText {
    text: String,
    char_len: usize,
}

impl CleanText {
    /// Wraps already-clean text. Does not re-run normalization.
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let char_len = text.chars().count();
        CleanText { text, char_len }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Number of Unicode scalar values in the text.
    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.text.chars()
    }
}

impl From<String> for CleanText {
    fn from(s: String) -> Self {
        CleanText::new(s)
    }
}

impl From<CleanText> for String {
    fn from(c: CleanText) -> Self {
        c.text
    }
}

impl From<&str> for CleanText {
    fn from(s: &str) -> Self {
        CleanText::new(s)
    }
}

impl std::fmt::Display for CleanText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// Toggles for the individual cleaning steps. All default to on.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeConfig {
    /// Remove `http://`, `https://`, and `www.`-prefixed runs.
    pub url_removal: bool,
    /// Remove whitespace-delimited tokens of the form `@` + 1..=64 non-space chars.
    pub username_removal: bool,
    /// Drop the quoted block entirely. When off, the quote is kept in front
    /// of the body and cleaned along with it.
    pub quote_removal: bool,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            url_removal: true,
            username_removal: true,
            quote_removal: true,
        }
    }
}

/// Cleans a raw comment into model-ready text.
///
/// Removal is deletion, not masking: no placeholder token is left behind.
/// Everything that is not a removed URL, mention, or quote comes through
/// unchanged (modulo NFC), including emoji and ASCII-art emoticons.
/// Idempotent: normalizing already-normalized text is the identity.
///
/// The output may be empty; see [`is_effectively_empty`].
pub fn normalize(raw: &RawComment, config: &NormalizeConfig) -> CleanText {
    let mut text = if config.quote_removal {
        raw.body.clone()
    } else {
        match &raw.quoted_block {
            Some(q) => format!("{} {}", q, raw.body),
            None => raw.body.clone(),
        }
    };

    if config.url_removal {
        text = URL_RE.replace_all(&text, " ").into_owned();
    }

    if config.username_removal {
        text = strip_mention_tokens(&text);
    }

    let collapsed = collapse_whitespace(&text);
    let nfc = if is_nfc(&collapsed) {
        collapsed
    } else {
        collapsed.nfc().collect()
    };
    CleanText::new(nfc)
}

/// True iff the text is empty or whitespace-only. Used to drop comments
/// that cleaning reduced to nothing.
pub fn is_effectively_empty(clean: &CleanText) -> bool {
    clean.text().chars().all(char::is_whitespace)
}

/// Drops whitespace-delimited tokens that are `@` followed by 1..=64
/// non-whitespace characters. A bare `@` or an over-long mention is not a
/// username token and stays.
fn strip_mention_tokens(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
        out.push_str(&rest[..start]);
        rest = &rest[start..];
        let end = rest
            .find(char::is_whitespace)
            .unwrap_or(rest.len());
        let token = &rest[..end];
        if !is_mention(token) {
            out.push_str(token);
        } else {
            out.push(' ');
        }
        rest = &rest[end..];
    }
    out.push_str(rest);
    out
}

fn is_mention(token: &str) -> bool {
    let mut chars = token.chars();
    if chars.next() != Some('@') {
        return false;
    }
    let tail = chars.count();
    (1..=64).contains(&tail)
}

/// Collapses every run of Unicode whitespace to a single ASCII space and
/// trims the ends.
fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comment(body: &str) -> RawComment {
        RawComment {
            id: "c1".into(),
            body: body.into(),
            quoted_block: None,
            topic: None,
        }
    }

    fn norm(body: &str) -> String {
        normalize(&comment(body), &NormalizeConfig::default())
            .text()
            .to_string()
    }

    #[test]
    fn removes_links_and_mentions() {
        assert_eq!(
            norm("xem này https://voz.vn/t/abc @user123 vãi =))"),
            "xem này vãi =))"
        );
    }

    #[test]
    fn preserves_emoji() {
        assert_eq!(norm("ngu quá 😂😂"), "ngu quá 😂😂");
    }

    #[test]
    fn drops_quoted_block() {
        let raw = RawComment {
            id: "c2".into(),
            body: "đồng ý".into(),
            quoted_block: Some("thằng kia nói...".into()),
            topic: None,
        };
        let clean = normalize(&raw, &NormalizeConfig::default());
        assert_eq!(clean.text(), "đồng ý");
    }

    #[test]
    fn keeps_quote_when_removal_off() {
        let raw = RawComment {
            id: "c3".into(),
            body: "đồng ý".into(),
            quoted_block: Some("ai đó nói".into()),
            topic: None,
        };
        let cfg = NormalizeConfig {
            quote_removal: false,
            ..NormalizeConfig::default()
        };
        assert_eq!(normalize(&raw, &cfg).text(), "ai đó nói đồng ý");
    }

    #[test]
    fn www_prefixed_links_removed() {
        assert_eq!(norm("link www.voz.vn/abc đây"), "link đây");
    }

    #[test]
    fn bare_at_sign_survives() {
        assert_eq!(norm("giá @ 100k"), "giá @ 100k");
    }

    #[test]
    fn email_like_token_survives() {
        assert_eq!(norm("mail a@b.com nhé"), "mail a@b.com nhé");
    }

    #[test]
    fn overlong_mention_survives() {
        let long = format!("@{}", "x".repeat(65));
        assert_eq!(norm(&format!("a {long} b")), format!("a {long} b"));
    }

    #[test]
    fn collapses_whitespace_and_trims() {
        assert_eq!(norm("  a \t b\n\nc  "), "a b c");
    }

    #[test]
    fn output_is_nfc() {
        // "ậ" decomposed: a + combining circumflex + combining dot below
        let clean = norm("th\u{0061}\u{0302}\u{0323}t");
        assert_eq!(clean, "thật");
        assert_eq!(clean.chars().count(), 4);
    }

    #[test]
    fn empty_detection() {
        assert!(is_effectively_empty(&CleanText::new("")));
        assert!(is_effectively_empty(&CleanText::new("   ")));
        assert!(!is_effectively_empty(&CleanText::new("ok")));
    }

    #[test]
    fn normalize_is_idempotent() {
        let cases = [
            "xem này https://voz.vn/t/abc @user123 vãi =))",
            "ngu quá 😂😂",
            "  a   b @ c www.x.y  ",
            "@only",
        ];
        let cfg = NormalizeConfig::default();
        for body in cases {
            let once = normalize(&comment(body), &cfg);
            let twice = normalize(&comment(once.text()), &cfg);
            assert_eq!(once, twice, "not idempotent for {body:?}");
        }
    }

    #[test]
    fn char_len_tracks_scalar_values() {
        let c = CleanText::new("ậ😂");
        assert_eq!(c.char_len(), 2);
    }
}
