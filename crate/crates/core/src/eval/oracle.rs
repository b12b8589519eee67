//! A second, non-streaming route to the alignment counts.
//!
//! Both token sequences spell the same canonical string; each token is then a character span of
//! it. A true positive is a span present on both sides. Every other stretch between boundaries
//! shared by both sides is one error region; its extra system pieces are false positives and its
//! extra gold pieces false negatives.

use crate::error::{Error, Result};
use crate::normalize::canonical;

use super::align::AlignmentCounts;

fn spans<S: AsRef<str>>(lines: &[S]) -> Result<(String, Vec<(usize, usize)>)> {
    let mut text = String::new();
    let mut spans = Vec::new();
    for line in lines.iter().map(AsRef::as_ref).filter(|l| !l.trim().is_empty()) {
        let canon = canonical(line);
        if canon.is_empty() {
            return Err(Error::Config(format!("line `{line}` has an empty canonical form")));
        }
        let start = text.len();
        text.push_str(&canon);
        spans.push((start, text.len()));
    }
    Ok((text, spans))
}

/// Quadratic reference implementation of strict alignment.
pub fn align_oracle<G, S>(gold: &[G], sys: &[S]) -> Result<AlignmentCounts>
where
    G: AsRef<str>,
    S: AsRef<str>,
{
    let (gold_text, gold_spans) = spans(gold)?;
    let (sys_text, sys_spans) = spans(sys)?;
    if gold_text != sys_text {
        let at = gold_text
            .bytes()
            .zip(sys_text.bytes())
            .position(|(a, b)| a != b)
            .unwrap_or(gold_text.len().min(sys_text.len()));
        return Err(Error::Divergence {
            gold_line: 0,
            sys_line: 0,
            detail: format!("canonical texts differ from byte {at}"),
        });
    }

    let tp = gold_spans.iter().filter(|g| sys_spans.iter().any(|s| s == *g)).count() as u64;

    let ends = |spans: &[(usize, usize)]| -> Vec<usize> {
        std::iter::once(0).chain(spans.iter().map(|s| s.1)).collect()
    };
    let gold_ends = ends(&gold_spans);
    let sys_ends = ends(&sys_spans);
    let shared = gold_ends.iter().filter(|b| sys_ends.contains(b)).count() as u64;
    let segments = shared.saturating_sub(1);
    let errors = segments - tp;

    let gold_tokens = gold_spans.len() as u64;
    let sys_tokens = sys_spans.len() as u64;
    Ok(AlignmentCounts {
        tp,
        fp: sys_tokens - tp - errors,
        fn_: gold_tokens - tp - errors,
        errors,
        gold_tokens,
        sys_tokens,
        tn: 0,
    })
}
