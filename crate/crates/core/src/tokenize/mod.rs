//! Tokenizer stages and the pipeline that composes them.
//!
//! Text-level stages rewrite a sentence string (character normalization, span cleaning,
//! punctuation spacing, regex space correction). [`split_space`] then cuts the text at
//! whitespace, and stream-level stages re-join tokens (multiword units, verb groups, bound
//! morphemes). Every built-in stage except a placeholder-substituting cleaner only moves token
//! boundaries; the letters are never touched.

mod join;
mod pipeline;
mod rules;
mod text;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use join::{bound_morpheme_fix, multiword_join, verb_join, MultiwordIndex, VERB_JOINER};
pub use pipeline::{run_pipeline, Pipeline, PipelineOutput, PipelineSpec, StageId, StagePhase, StageSpec, StageTimings};
pub use rules::{rule_space_correction, SpaceRule, SpaceRules};
pub use text::{punctuation_space, sentence_split, split_space, split_tokens, SentenceSplitter, PUNCTUATION};

/// Tokens of one or more sentences.
///
/// `boundaries` holds the exclusive end offset of every sentence, so the last boundary equals
/// the token count. No token is empty or contains whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    tokens: Vec<String>,
    boundaries: Vec<usize>,
}

impl TokenStream {
    pub fn new(tokens: Vec<String>, boundaries: Vec<usize>) -> Result<Self> {
        if let Some(t) = tokens.iter().find(|t| t.is_empty() || t.chars().any(char::is_whitespace)) {
            return Err(Error::Config(format!("invalid token {t:?}: empty or contains whitespace")));
        }
        let increasing = boundaries.windows(2).all(|w| w[0] < w[1]);
        let ends = boundaries.last().copied().unwrap_or(0) == tokens.len();
        if !increasing || !ends || boundaries.first() == Some(&0) {
            return Err(Error::Config(format!(
                "sentence boundaries {boundaries:?} do not partition {} tokens",
                tokens.len()
            )));
        }
        Ok(TokenStream { tokens, boundaries })
    }

    /// Builds a stream from per-sentence token lists; empty sentences are dropped.
    ///
    /// Panics if a token is empty or contains whitespace.
    pub fn from_sentences<I>(sentences: I) -> Self
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut stream = TokenStream::default();
        for sentence in sentences {
            stream.push_sentence(sentence);
        }
        stream
    }

    /// A single sentence.
    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        Self::from_sentences([tokens.into_iter().map(Into::into).collect()])
    }

    pub(crate) fn push_sentence(&mut self, sentence: Vec<String>) {
        if sentence.is_empty() {
            return;
        }
        assert!(
            sentence.iter().all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)),
            "tokens must be non-empty and free of whitespace: {sentence:?}"
        );
        self.tokens.extend(sentence);
        self.boundaries.push(self.tokens.len());
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[String]> {
        let starts = std::iter::once(0).chain(self.boundaries.iter().copied());
        starts
            .zip(self.boundaries.iter().copied())
            .map(move |(start, end)| &self.tokens[start..end])
    }

    /// Applies `f` to each sentence independently.
    pub fn map_sentences(&self, f: impl FnMut(&[String]) -> Vec<String>) -> TokenStream {
        TokenStream::from_sentences(self.sentences().map(f))
    }

    pub fn into_sentences(self) -> Vec<Vec<String>> {
        let mut tokens = self.tokens.into_iter();
        let mut start = 0;
        self.boundaries
            .iter()
            .map(|&end| {
                let sentence = tokens.by_ref().take(end - start).collect();
                start = end;
                sentence
            })
            .collect()
    }

    pub fn append(&mut self, other: TokenStream) {
        for sentence in other.into_sentences() {
            self.push_sentence(sentence);
        }
    }
}
