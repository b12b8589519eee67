#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::eval::{align, align_oracle, AlignMode};

// Gold and system token lines separated by a NUL byte.
fuzz_target!(|text: &str| {
    let (gold, sys) = text.split_once('\0').unwrap_or((text, ""));
    let gold: Vec<&str> = gold.lines().filter(|l| !l.trim().is_empty()).collect();
    let sys: Vec<&str> = sys.lines().filter(|l| !l.trim().is_empty()).collect();
    let strict = align(&gold, &sys, AlignMode::Strict);
    let lenient = align(&gold, &sys, AlignMode::Lenient);
    if let Ok(c) = &strict {
        assert_eq!(lenient.as_ref().ok(), Some(c));
        if let Ok(o) = align_oracle(&gold, &sys) {
            assert_eq!(&o, c);
        }
    }
});
