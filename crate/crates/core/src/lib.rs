//! Rule-based Persian word tokenization and tokenizer evaluation.
//!
//! - [`corpus`]: gold corpora from dependency treebanks, corruption, token-line files, fixtures.
//! - [`normalize`]: character maps, canonical comparison form, span cleaning.
//! - [`lexicon`]: verb stems, auxiliaries, affixes and multiword entries.
//! - [`tokenize`]: tokenizer stages and the pipelines composing them.
//! - [`eval`]: greedy line alignment, metrics and reports.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod normalize;
pub mod tokenize;

pub use error::{Error, Result};
