#![no_main]

use argbind::datagen::{parse_record, validate_dataset, Vocabulary};
use libfuzzer_sys::fuzz_target;
use std::sync::LazyLock;

static VOCAB: LazyLock<Vocabulary> = LazyLock::new(Vocabulary::default_vocab);

fuzz_target!(|line: &str| {
    let Ok(inst) = parse_record(line) else { return };
    let report = validate_dataset(std::slice::from_ref(&inst), &VOCAB.lexicon);
    assert_eq!(report.instances, 1);
    for v in &report.violations {
        let _ = v.to_string();
    }
});
