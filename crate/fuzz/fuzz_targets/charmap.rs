#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::normalize::{normalize_chars, CharMap};

fuzz_target!(|text: &str| {
    if let Ok(map) = CharMap::parse(text, "fuzz") {
        let _ = normalize_chars(text, &map);
    }
    let once = normalize_chars(text, CharMap::persian());
    assert_eq!(normalize_chars(&once, CharMap::persian()), once);
});
