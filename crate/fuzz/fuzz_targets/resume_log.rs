#![no_main]

use argbind_harness::read_log;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("generations.log.jsonl");
    std::fs::write(&path, bytes).unwrap();
    let Ok(first) = read_log(&path) else { return };
    // a repaired log reads back unchanged and ends on a line boundary
    let repaired = std::fs::read(&path).unwrap();
    assert!(repaired.is_empty() || repaired.ends_with(b"\n"));
    assert_eq!(read_log(&path).unwrap(), first);
    assert_eq!(std::fs::read(&path).unwrap(), repaired);
});
