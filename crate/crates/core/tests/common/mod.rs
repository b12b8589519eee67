#![allow(dead_code)]

use std::collections::HashSet;

use pertok::lexicon::{Lexicon, Resource};
use pertok::normalize::canonical;
use proptest::prelude::*;
use rand::Rng;

pub const ZWNJ: char = '\u{200C}';

/// A small lexicon in Latin transliteration, independent of the bundled data.
pub fn test_lexicon() -> Lexicon {
    Lexicon::from_lists(&[
        (Resource::PastStems, &["khast", "raft", "goft", "amad", "kard"]),
        (Resource::PresentStems, &["rav", "gu", "kon", "xah"]),
        (Resource::Auxiliaries, &["ast", "bood", "nemidosheh", "shodeh", "khahad"]),
        (Resource::VerbPrefixes, &["mi", "nemi"]),
        (Resource::VerbEndings, &["eh", "am", "and", "id"]),
        (Resource::Prefixes, &["ba", "na", "bi"]),
        (Resource::Suffixes, &["ha", "hayi", "tar", "tarin"]),
        (Resource::Multiwords, &["goft o goo", "be onvan", "ba in hal"]),
    ])
}

/// Cuts the canonical character stream of `gold` at random places: every gold boundary is kept
/// with probability `keep`, every other character gap becomes a boundary with probability
/// `split`. Produces over-splits, under-splits and mixed regions.
pub fn resegment(gold: &[String], keep: f64, split: f64, rng: &mut impl Rng) -> Vec<String> {
    let mut chars = Vec::new();
    let mut gold_cuts = HashSet::new();
    for t in gold {
        chars.extend(canonical(t).chars());
        gold_cuts.insert(chars.len());
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, c) in chars.iter().enumerate() {
        cur.push(*c);
        let pos = i + 1;
        if pos == chars.len() {
            break;
        }
        let p = if gold_cuts.contains(&pos) { keep } else { split };
        if rng.gen_bool(p) {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Letters used by the random-text strategies: Latin, Persian, Arabic variants of Persian letters.
pub const LETTERS: &str = "abcdehiklmnorstuvxyzابپتجچخدرزسشکگلمنوهیيكۀة";

pub fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(LETTERS.chars().collect::<Vec<_>>()), 1..7)
        .prop_map(|cs| cs.into_iter().collect())
}

/// A gold token: letters with optional internal ZWNJ.
pub fn gold_token() -> impl Strategy<Value = String> {
    proptest::collection::vec(word(), 1..4).prop_map(|parts| parts.join(&ZWNJ.to_string()))
}

pub fn gold_sentences() -> impl Strategy<Value = Vec<Vec<String>>> {
    proptest::collection::vec(proptest::collection::vec(gold_token(), 1..12), 1..6)
}

/// Fragments mixing words, lexicon items, punctuation, numbers, URLs, emails, hashtags, emoji
/// and joiners.
pub fn fragment() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => word(),
        2 => proptest::sample::select(vec![
            "mi", "nemi", "khast", "eh", "ast", "ha", "na", "ba", "goft", "o", "goo", "tar",
            "می", "نمی", "ها", "های", "تر", "ترین", "بی", "نا",
        ])
        .prop_map(str::to_string),
        2 => proptest::sample::select(vec![
            ".", ",", "!", "?", "؟", "،", "؛", ":", "(", ")", "«", "»", "...", "…", "\"", "-",
        ])
        .prop_map(str::to_string),
        1 => proptest::sample::select(vec![
            "12", "3.5", "۱۲۳", "٤٥", "1,000", "http://x.ir/a?b=1", "www.test.com.", "a@b.co",
            "#تگ", "#tag_1", "😀", "👍🏽", "Dr.", "U.S.",
        ])
        .prop_map(str::to_string),
        1 => proptest::sample::select(vec![" ", "  ", "\u{200C}", "_", "\t"]).prop_map(str::to_string),
    ]
}

/// One line of noisy text.
pub fn noisy_line() -> impl Strategy<Value = String> {
    proptest::collection::vec((fragment(), proptest::bool::weighted(0.7)), 0..25).prop_map(|parts| {
        let mut s = String::new();
        for (frag, spaced) in parts {
            if spaced && !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&frag);
        }
        s
    })
}

pub fn concat_canonical<'a>(tokens: impl IntoIterator<Item = &'a String>) -> String {
    tokens.into_iter().map(|t| canonical(t)).collect()
}
