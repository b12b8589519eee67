use std::collections::HashSet;

use crate::normalize::{find_spans, SpanKind};

use super::TokenStream;

/// Marks isolated by [`punctuation_space`].
pub const PUNCTUATION: &[char] = &[
    '.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '{', '}', '«', '»', '"', '،', '؛', '؟', '…',
];

const SENTENCE_MARKS: &[char] = &['.', '?', '!', '؟', '…'];
const CLOSERS: &[char] = &[')', ']', '}', '»', '"', '\''];

/// Whitespace-delimited pieces of `text`, as owned strings.
pub fn split_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// The whitespace baseline: one sentence whose tokens are the non-empty runs between whitespace.
pub fn split_space(text: &str) -> TokenStream {
    TokenStream::from_sentences([split_tokens(text)])
}

/// Sentence segmentation at full stops, question and exclamation marks.
#[derive(Debug, Clone, Default)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl SentenceSplitter {
    /// `abbreviations` are words including their final period, e.g. `"e.g."`.
    pub fn new<S: Into<String>>(abbreviations: impl IntoIterator<Item = S>) -> Self {
        SentenceSplitter {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
        }
    }

    /// Splits after runs of boundary marks (and any closing brackets or quotes right after them)
    /// when followed by whitespace or the end of text. A period does not end a sentence when the
    /// word it closes is a listed abbreviation or a dotted initialism such as `U.S.`.
    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut sentences = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let (_, c) = chars[i];
            if !SENTENCE_MARKS.contains(&c) {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < chars.len() && SENTENCE_MARKS.contains(&chars[j].1) {
                j += 1;
            }
            while j < chars.len() && CLOSERS.contains(&chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
            let at_break = chars.get(j).is_none_or(|(_, c)| c.is_whitespace());
            let only_period = chars[i..j].iter().all(|(_, c)| *c == '.' || CLOSERS.contains(c));
            if at_break && !(only_period && self.is_abbreviation(text, chars[i].0)) {
                push_trimmed(&mut sentences, &text[start..end]);
                start = end;
            }
            i = j;
        }
        push_trimmed(&mut sentences, &text[start..]);
        sentences
    }

    fn is_abbreviation(&self, text: &str, period: usize) -> bool {
        let word_start = text[..period]
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_whitespace())
            .map_or(0, |(b, c)| b + c.len_utf8());
        let word = &text[word_start..period + 1];
        if self.abbreviations.contains(word) {
            return true;
        }
        // Dotted initialisms: at least two single letters each followed by a period.
        let mut letters = 0;
        let mut chars = word.chars();
        loop {
            match (chars.next(), chars.next()) {
                (Some(l), Some('.')) if l.is_alphabetic() => letters += 1,
                (None, _) => return letters >= 2,
                _ => return false,
            }
        }
    }
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// [`SentenceSplitter::split`] with no abbreviation list.
pub fn sentence_split(text: &str) -> Vec<String> {
    SentenceSplitter::default().split(text)
}

/// Surrounds punctuation with spaces so that [`split_space`] isolates it. A run of one repeated
/// mark (`...`, `!!`) stays together. URLs, e-mail addresses, hashtags and numbers (including
/// their decimal and thousands separators) are copied untouched.
pub fn punctuation_space(text: &str) -> String {
    let protected: Vec<_> = find_spans(text)
        .into_iter()
        .filter(|s| s.kind != SpanKind::Emoji)
        .map(|s| s.range)
        .collect();
    let mut out = String::with_capacity(text.len() + text.len() / 8);
    let mut spans = protected.iter().peekable();
    let mut iter = text.char_indices().peekable();
    while let Some((b, c)) = iter.next() {
        if let Some(span) = spans.peek() {
            if span.start == b {
                out.push_str(&text[(*span).clone()]);
                let end = span.end;
                spans.next();
                while iter.peek().is_some_and(|(nb, _)| *nb < end) {
                    iter.next();
                }
                continue;
            }
        }
        if !PUNCTUATION.contains(&c) {
            out.push(c);
            continue;
        }
        if out.chars().next_back().is_some_and(|p| !p.is_whitespace()) {
            out.push(' ');
        }
        out.push(c);
        while iter.peek().is_some_and(|(_, n)| *n == c) {
            out.push(c);
            iter.next();
        }
        if iter.peek().is_some_and(|(_, n)| !n.is_whitespace()) {
            out.push(' ');
        }
    }
    out
}
