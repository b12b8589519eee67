#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::tokenize::{rule_space_correction, SpaceRules};

fuzz_target!(|text: &str| {
    if let Ok(rules) = SpaceRules::parse(text, "fuzz") {
        let _ = rule_space_correction(text, &rules);
    }
    let _ = rule_space_correction(text, &SpaceRules::persian());
});
