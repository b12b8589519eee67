#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::corpus::{corpus_stats, corrupt, parse_token_lines};

fuzz_target!(|text: &str| {
    let gold = parse_token_lines(text, "fuzz");
    for line in corrupt(&gold) {
        assert!(!line.contains('\n'));
    }
    if let Ok(stats) = corpus_stats(&gold) {
        assert!(stats.n_tokens >= stats.n_sentences);
    }
});
