#![no_main]

use argbind::scoring::PredictedAnswer;
use argbind_harness::parse_model_answer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|generation: &str| {
    let a = parse_model_answer(generation);
    if a != PredictedAnswer::Unparseable {
        let first = generation.trim_start().lines().next().unwrap_or("").to_lowercase();
        assert!(first.contains("yes") || first.contains("no"));
    }
});
