#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::normalize::{clean_text, find_spans, CleanPolicy, SpanAction};
use pertok::tokenize::{Pipeline, PipelineSpec};

fuzz_target!(|text: &str| {
    for s in find_spans(text) {
        assert!(text.is_char_boundary(s.range.start) && text.is_char_boundary(s.range.end));
    }
    let policy = CleanPolicy {
        url: SpanAction::Placeholder("URL".into()),
        email: SpanAction::Placeholder("EMAIL".into()),
        hashtag: SpanAction::Keep,
        number: SpanAction::Placeholder("NUM".into()),
        emoji: SpanAction::Drop,
    };
    let _ = clean_text(text, &policy);
    let p = Pipeline::build(&PipelineSpec::from_name("full").unwrap()).unwrap();
    for t in p.run(text).stream.tokens() {
        assert!(!t.is_empty());
    }
});
