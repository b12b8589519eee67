//! Character normalization, text cleaning and the joiner-insensitive canonical form.
//!
//! Three pieces live here:
//!
//! * [`CharMap`] rewrites Arabic letter variants, Arabic-Indic digits and presentation-form
//!   ligatures into their Persian counterparts. The default table ships as `data/charmap.txt`.
//! * [`clean_text`] finds URLs, e-mail addresses, hashtags, numbers and emoji and replaces them
//!   according to a [`CleanPolicy`].
//! * [`canonical`] erases every joiner (space, underscore, ZWNJ) and applies the default map. Two
//!   tokenizations of the same text compare equal under it, which is what the evaluator relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zero-width non-joiner, the Persian half-space.
pub const ZWNJ: char = '\u{200C}';

/// Characters that only separate or glue word parts. [`canonical`] removes all of them.
pub const JOINERS: [char; 3] = [' ', '_', ZWNJ];

pub fn is_joiner(c: char) -> bool {
    JOINERS.contains(&c)
}

const DEFAULT_CHARMAP: &str = include_str!("../data/charmap.txt");

/// A single-pass code point substitution table.
///
/// No replacement contains a code point that is itself a mapping source, so applying the map
/// once reaches a fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharMap {
    pairs: BTreeMap<char, String>,
}

impl CharMap {
    pub fn new(pairs: impl IntoIterator<Item = (char, String)>) -> Result<Self> {
        let pairs: BTreeMap<char, String> = pairs.into_iter().collect();
        for (src, target) in &pairs {
            if target.is_empty() {
                return Err(Error::Config(format!("mapping for U+{:04X} is empty", *src as u32)));
            }
            if let Some(c) = target.chars().find(|c| pairs.contains_key(c)) {
                return Err(Error::Config(format!(
                    "mapping for U+{:04X} produces U+{:04X}, which is itself mapped",
                    *src as u32, c as u32
                )));
            }
            if target.chars().any(is_joiner) || is_joiner(*src) {
                return Err(Error::Config(format!(
                    "mapping for U+{:04X} involves a joiner character",
                    *src as u32
                )));
            }
        }
        Ok(CharMap { pairs })
    }

    /// The built-in Persian map.
    pub fn persian() -> &'static CharMap {
        static MAP: OnceLock<CharMap> = OnceLock::new();
        MAP.get_or_init(|| CharMap::parse(DEFAULT_CHARMAP, "charmap.txt").expect("built-in charmap is valid"))
    }

    /// Parses lines of the form `U+XXXX U+YYYY[,U+ZZZZ]`. `#` starts a comment.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(src), Some(dst), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(source_name, line_no, "expected `U+XXXX U+YYYY[,U+ZZZZ]`"));
            };
            let src = parse_code_point(src).map_err(|m| Error::parse(source_name, line_no, m))?;
            let target = dst
                .split(',')
                .map(parse_code_point)
                .collect::<std::result::Result<String, _>>()
                .map_err(|m| Error::parse(source_name, line_no, m))?;
            pairs.push((src, target));
        }
        CharMap::new(pairs).map_err(|e| match e {
            Error::Config(m) => Error::parse(source_name, 0, m),
            other => other,
        })
    }

    pub fn get(&self, c: char) -> Option<&str> {
        self.pairs.get(&c).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, &str)> {
        self.pairs.iter().map(|(c, s)| (*c, s.as_str()))
    }
}

impl fmt::Display for CharMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (src, target) in &self.pairs {
            write!(f, "U+{:04X} ", *src as u32)?;
            for (i, c) in target.chars().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "U+{:04X}", c as u32)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn parse_code_point(field: &str) -> std::result::Result<char, String> {
    let hex = field
        .strip_prefix("U+")
        .or_else(|| field.strip_prefix("u+"))
        .ok_or_else(|| format!("`{field}` is not of the form U+XXXX"))?;
    if hex.is_empty() || hex.len() > 6 {
        return Err(format!("`{field}` is not of the form U+XXXX"));
    }
    let value = u32::from_str_radix(hex, 16).map_err(|_| format!("`{field}` is not hexadecimal"))?;
    char::from_u32(value).ok_or_else(|| format!("`{field}` is not a Unicode scalar value"))
}

/// Replaces every code point in the map's domain; all other code points pass through.
pub fn normalize_chars(text: &str, map: &CharMap) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match map.get(c) {
            Some(target) => out.push_str(target),
            None => out.push(c),
        }
    }
    out
}

/// Joiner-insensitive comparison key: drops spaces, underscores and ZWNJ, then applies the
/// default Persian map.
pub fn canonical(s: &str) -> String {
    let map = CharMap::persian();
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if is_joiner(c) {
            continue;
        }
        match map.get(c) {
            Some(target) => out.push_str(target),
            None => out.push(c),
        }
    }
    out
}

/// What to do with a span recognised by [`clean_text`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanAction {
    /// Leave the span untouched. Later stages treat it as a single token.
    Keep,
    /// Remove the span. Only valid for emoji.
    Drop,
    Placeholder(String),
}

impl SpanAction {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "keep" => Ok(SpanAction::Keep),
            "drop" => Ok(SpanAction::Drop),
            _ => match s.strip_prefix("placeholder:") {
                Some(p) => Ok(SpanAction::Placeholder(p.to_string())),
                None => Err(Error::Config(format!(
                    "unknown span action `{s}` (expected keep, drop or placeholder:TEXT)"
                ))),
            },
        }
    }
}

impl fmt::Display for SpanAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanAction::Keep => f.write_str("keep"),
            SpanAction::Drop => f.write_str("drop"),
            SpanAction::Placeholder(p) => write!(f, "placeholder:{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanKind {
    Url,
    Email,
    Hashtag,
    Number,
    Emoji,
}

impl SpanKind {
    pub const ALL: [SpanKind; 5] = [
        SpanKind::Url,
        SpanKind::Email,
        SpanKind::Hashtag,
        SpanKind::Number,
        SpanKind::Emoji,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpanKind::Url => "url",
            SpanKind::Email => "email",
            SpanKind::Hashtag => "hashtag",
            SpanKind::Number => "number",
            SpanKind::Emoji => "emoji",
        }
    }

    /// The regular expression recognising this kind of span. Numbers and hashtags additionally
    /// require that the span is not glued to a preceding letter or digit.
    pub fn pattern(self) -> &'static str {
        match self {
            SpanKind::Url => {
                r#"(?i:https?://|ftp://|www\.)[^\s<>"«»]*[^\s<>"«».,;:!?)\]}'،؛؟]"#
            }
            SpanKind::Email => {
                r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}"
            }
            SpanKind::Hashtag => r"#(?:[\p{L}\p{N}_\x{200C}]*[\p{L}\p{N}_])",
            SpanKind::Number => {
                r"[0-9\x{06F0}-\x{06F9}\x{0660}-\x{0669}]+(?:[.,/\x{066B}\x{066C}][0-9\x{06F0}-\x{06F9}\x{0660}-\x{0669}]+)*"
            }
            SpanKind::Emoji => {
                r"(?:[\x{1F1E6}-\x{1F1FF}]{2}|\p{Extended_Pictographic}(?:\x{FE0F}|[\x{1F3FB}-\x{1F3FF}]|\x{200D}\p{Extended_Pictographic}\x{FE0F}?)*)"
            }
        }
    }

    fn needs_left_boundary(self) -> bool {
        matches!(self, SpanKind::Hashtag | SpanKind::Number)
    }

    fn needs_right_boundary(self) -> bool {
        matches!(self, SpanKind::Number)
    }
}

/// Whether a recognised span of `kind` at `range` stands on its own inside `text`.
pub fn span_has_boundaries(text: &str, kind: SpanKind, range: &Range<usize>) -> bool {
    let glued = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric() || c == '_');
    if kind.needs_left_boundary() && glued(text[..range.start].chars().next_back()) {
        return false;
    }
    if kind.needs_right_boundary() && glued(text[range.end..].chars().next()) {
        return false;
    }
    true
}

fn kind_regexes() -> &'static [Regex; 5] {
    static RES: OnceLock<[Regex; 5]> = OnceLock::new();
    RES.get_or_init(|| SpanKind::ALL.map(|k| Regex::new(k.pattern()).expect("span pattern compiles")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub kind: SpanKind,
    pub range: Range<usize>,
}

fn next_of_kind(text: &str, kind: SpanKind, re: &Regex, mut from: usize) -> Option<Range<usize>> {
    while from <= text.len() {
        let m = re.find_at(text, from)?;
        let range = m.range();
        if span_has_boundaries(text, kind, &range) {
            return Some(range);
        }
        let step = text[range.start..].chars().next().map_or(1, char::len_utf8);
        from = range.start + step;
    }
    None
}

/// Non-overlapping URL/email/hashtag/number/emoji spans, chosen left to right. At each step the
/// candidate with the earliest start wins; among equal starts the longest wins, then the kind
/// listed first in [`SpanKind::ALL`].
pub fn find_spans(text: &str) -> Vec<Span> {
    let regexes = kind_regexes();
    let mut cache: [Option<Range<usize>>; 5] = Default::default();
    let mut exhausted = [false; 5];
    let mut spans = Vec::new();
    let mut pos = 0;
    loop {
        let mut best: Option<Span> = None;
        for (i, kind) in SpanKind::ALL.into_iter().enumerate() {
            if exhausted[i] {
                continue;
            }
            if cache[i].as_ref().is_none_or(|r| r.start < pos) {
                cache[i] = next_of_kind(text, kind, &regexes[i], pos);
                if cache[i].is_none() {
                    exhausted[i] = true;
                    continue;
                }
            }
            let range = cache[i].clone().expect("cached");
            let better = match &best {
                None => true,
                Some(b) => {
                    range.start < b.range.start || (range.start == b.range.start && range.end > b.range.end)
                }
            };
            if better {
                best = Some(Span { kind, range });
            }
        }
        match best {
            Some(span) => {
                pos = span.range.end.max(span.range.start + 1);
                spans.push(span);
            }
            None => return spans,
        }
    }
}

/// Per-category handling of the spans found by [`clean_text`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanPolicy {
    pub url: SpanAction,
    pub email: SpanAction,
    pub hashtag: SpanAction,
    pub number: SpanAction,
    pub emoji: SpanAction,
}

impl Default for CleanPolicy {
    fn default() -> Self {
        CleanPolicy {
            url: SpanAction::Keep,
            email: SpanAction::Keep,
            hashtag: SpanAction::Keep,
            number: SpanAction::Keep,
            emoji: SpanAction::Keep,
        }
    }
}

impl CleanPolicy {
    pub fn action(&self, kind: SpanKind) -> &SpanAction {
        match kind {
            SpanKind::Url => &self.url,
            SpanKind::Email => &self.email,
            SpanKind::Hashtag => &self.hashtag,
            SpanKind::Number => &self.number,
            SpanKind::Emoji => &self.emoji,
        }
    }

    pub fn action_mut(&mut self, kind: SpanKind) -> &mut SpanAction {
        match kind {
            SpanKind::Url => &mut self.url,
            SpanKind::Email => &mut self.email,
            SpanKind::Hashtag => &mut self.hashtag,
            SpanKind::Number => &mut self.number,
            SpanKind::Emoji => &mut self.emoji,
        }
    }

    pub fn is_all_keep(&self) -> bool {
        SpanKind::ALL.iter().all(|k| *self.action(*k) == SpanAction::Keep)
    }

    pub fn validate(&self) -> Result<()> {
        for kind in SpanKind::ALL {
            match self.action(kind) {
                SpanAction::Keep => {}
                SpanAction::Drop if kind == SpanKind::Emoji => {}
                SpanAction::Drop => {
                    return Err(Error::Config(format!("{} spans cannot be dropped", kind.name())));
                }
                SpanAction::Placeholder(p) => {
                    if p.is_empty() || p.chars().any(|c| c.is_whitespace() || is_joiner(c)) {
                        return Err(Error::Config(format!(
                            "placeholder for {} must be non-empty and free of whitespace",
                            kind.name()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Replaces recognised spans per `policy`. Text outside the spans is copied byte for byte, so an
/// all-keep policy returns the input unchanged.
pub fn clean_text(text: &str, policy: &CleanPolicy) -> String {
    if policy.is_all_keep() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for span in find_spans(text) {
        out.push_str(&text[last..span.range.start]);
        match policy.action(span.kind) {
            SpanAction::Keep => out.push_str(&text[span.range.clone()]),
            SpanAction::Drop => {}
            SpanAction::Placeholder(p) => out.push_str(p),
        }
        last = span.range.end;
    }
    out.push_str(&text[last..]);
    out
}
