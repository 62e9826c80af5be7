#![no_main]

use argbind::datagen::{generate_dataset, Count, DatasetId, GenSpec, Instance, Vocabulary};
use argbind::fol::MatchPolicy;
use argbind::jsonl::read_jsonl;
use argbind::scoring::{emit_report, FolPrediction, MetricsReport, QaPrediction, ReportFormat};
use libfuzzer_sys::fuzz_target;
use std::sync::LazyLock;

static VOCAB: LazyLock<Vocabulary> = LazyLock::new(Vocabulary::default_vocab);
static DATA: LazyLock<Vec<Instance>> =
    LazyLock::new(|| generate_dataset(&GenSpec::new(DatasetId::D22, 1, Count::N(4)), &VOCAB).unwrap());

fuzz_target!(|bytes: &[u8]| {
    if let Ok(preds) = read_jsonl::<QaPrediction, _>(bytes) {
        if let Ok(r) = MetricsReport::from_qa("fuzz", &DATA, &preds) {
            emit_report(&[r], ReportFormat::Csv);
        }
    }
    if let Ok(preds) = read_jsonl::<FolPrediction, _>(bytes) {
        for policy in [MatchPolicy::Canonical, MatchPolicy::StrictString] {
            if let Ok(r) = MetricsReport::from_fol("fuzz", &DATA, &preds, policy, &VOCAB.lexicon) {
                emit_report(&[r], ReportFormat::Markdown);
            }
        }
    }
});
