#![no_main]

use argbind_harness::{parse_completion, parse_retry_after};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = parse_completion(text);
    let _ = parse_retry_after(text);
});
