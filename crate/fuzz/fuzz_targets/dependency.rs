#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::corpus::{parse_dependency_bytes, parse_token_lines, write_token_lines};

fuzz_target!(|data: &[u8]| {
    let Ok(gold) = parse_dependency_bytes(data, 1, "fuzz") else { return };
    let mut buf = Vec::new();
    write_token_lines(&mut buf, gold.sentence_slices()).unwrap();
    let again = parse_token_lines(std::str::from_utf8(&buf).unwrap(), "fuzz");
    if gold.tokens().all(|t| !t.trim().is_empty() && !t.contains(['\n', '\r'])) {
        assert!(again.sentence_slices().eq(gold.sentence_slices()));
    }
});
