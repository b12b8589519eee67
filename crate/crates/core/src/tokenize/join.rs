use std::collections::HashMap;

use crate::lexicon::Lexicon;
use crate::normalize::ZWNJ;

use super::TokenStream;

/// Join character for verb groups.
pub const VERB_JOINER: char = '_';

fn join_with(parts: &[String], joiner: char) -> String {
    let mut out = String::with_capacity(parts.iter().map(|p| p.len() + joiner.len_utf8()).sum());
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push(joiner);
        }
        out.push_str(p);
    }
    out
}

/// Multiword dictionary entries keyed by their first part, longest first.
#[derive(Debug, Clone, Default)]
pub struct MultiwordIndex {
    by_first: HashMap<String, Vec<Vec<String>>>,
}

impl MultiwordIndex {
    pub fn new(lex: &Lexicon) -> Self {
        let mut by_first: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for entry in lex.multiwords.iter().filter(|e| e.len() >= 2) {
            by_first.entry(entry[0].clone()).or_default().push(entry.clone());
        }
        for entries in by_first.values_mut() {
            entries.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        }
        MultiwordIndex { by_first }
    }

    fn longest_at<'a>(&'a self, tokens: &[String]) -> Option<&'a [String]> {
        let candidates = self.by_first.get(tokens.first()?)?;
        candidates
            .iter()
            .find(|entry| tokens.len() >= entry.len() && tokens[..entry.len()] == entry[..])
            .map(Vec::as_slice)
    }

    /// Greedy leftmost-longest replacement within one sentence.
    pub fn join_sentence(&self, tokens: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_at(&tokens[i..]) {
                Some(entry) => {
                    out.push(join_with(&tokens[i..i + entry.len()], ZWNJ));
                    i += entry.len();
                }
                None => {
                    out.push(tokens[i].clone());
                    i += 1;
                }
            }
        }
        out
    }
}

/// Replaces dictionary multiword sequences with single ZWNJ-joined tokens.
pub fn multiword_join(stream: &TokenStream, lex: &Lexicon) -> TokenStream {
    let index = MultiwordIndex::new(lex);
    stream.map_sentences(|s| index.join_sentence(s))
}

/// Length of the verb group starting at `tokens[0]`, or 0 if there is none.
///
/// A group is an optional verb prefix, a stem (possibly carrying an attached ending), an optional
/// separate ending, then any number of auxiliaries, and spans at least two tokens.
pub(crate) fn verb_group_len(lex: &Lexicon, tokens: &[String]) -> usize {
    let mut j = 0;
    if tokens.len() >= 2 && lex.verb_prefixes.contains(&tokens[0]) && lex.is_verb_form(&tokens[1]) {
        j = 1;
    }
    if !tokens.get(j).is_some_and(|t| lex.is_verb_form(t)) {
        return 0;
    }
    j += 1;
    if tokens.get(j).is_some_and(|t| lex.verb_endings.contains(t)) {
        j += 1;
    }
    while tokens.get(j).is_some_and(|t| lex.auxiliaries.contains(t)) {
        j += 1;
    }
    if j >= 2 {
        j
    } else {
        0
    }
}

pub(crate) fn verb_join_sentence(lex: &Lexicon, tokens: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        match verb_group_len(lex, &tokens[i..]) {
            0 => {
                out.push(tokens[i].clone());
                i += 1;
            }
            n => {
                out.push(join_with(&tokens[i..i + n], VERB_JOINER));
                i += n;
            }
        }
    }
    out
}

/// Joins verb groups into single `_`-joined tokens, scanning each sentence left to right and
/// taking the maximal group at each position.
pub fn verb_join(stream: &TokenStream, lex: &Lexicon) -> TokenStream {
    stream.map_sentences(|s| verb_join_sentence(lex, s))
}

pub(crate) fn bound_morpheme_sentence(lex: &Lexicon, tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut pending_prefix: Option<String> = None;
    for (i, token) in tokens.iter().enumerate() {
        if let Some(mut prefix) = pending_prefix.take() {
            prefix.push(ZWNJ);
            prefix.push_str(token);
            if lex.prefixes.contains(token) && i + 1 < tokens.len() {
                pending_prefix = Some(prefix);
            } else {
                out.push(prefix);
            }
            continue;
        }
        if lex.suffixes.contains(token) {
            if let Some(last) = out.last_mut() {
                last.push(ZWNJ);
                last.push_str(token);
                continue;
            }
        }
        if lex.prefixes.contains(token) && i + 1 < tokens.len() {
            pending_prefix = Some(token.clone());
            continue;
        }
        out.push(token.clone());
    }
    debug_assert!(pending_prefix.is_none());
    out
}

/// Attaches suffix tokens to the preceding token and prefix tokens to the following one with
/// ZWNJ, in a single left-to-right pass per sentence. A token listed as both attaches as a
/// suffix when it can. Sentence-initial suffixes and sentence-final prefixes stay as they are.
pub fn bound_morpheme_fix(stream: &TokenStream, lex: &Lexicon) -> TokenStream {
    stream.map_sentences(|s| bound_morpheme_sentence(lex, s))
}
