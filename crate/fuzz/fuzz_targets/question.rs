#![no_main]

use argbind::datagen::{answer_text, generate_dataset, parse_question, Count, DatasetId, GenSpec, Vocabulary};
use argbind::predarg::PredArgStructure;
use libfuzzer_sys::fuzz_target;
use std::sync::LazyLock;

static STRUCTURE: LazyLock<PredArgStructure> = LazyLock::new(|| {
    let v = Vocabulary::default_vocab();
    let ds = generate_dataset(&GenSpec::new(DatasetId::D22, 1, Count::N(2)), &v).unwrap();
    ds[0].rebuild().unwrap().structure
});

fuzz_target!(|text: &str| {
    if let Ok(t) = parse_question(text) {
        assert!(matches!(t.conjuncts.len(), 1 | 2));
    }
    let _ = answer_text(text, &STRUCTURE);
});
