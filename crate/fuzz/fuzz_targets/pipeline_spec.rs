#![no_main]

use libfuzzer_sys::fuzz_target;
use pertok::tokenize::PipelineSpec;

fuzz_target!(|text: &str| {
    if let Ok(spec) = PipelineSpec::parse(text, "fuzz") {
        let again = PipelineSpec::parse(&spec.to_string(), "fuzz").unwrap();
        assert_eq!(again, spec);
    }
});
