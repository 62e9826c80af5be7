#![no_main]

use argbind_harness::RunConfig;
use libfuzzer_sys::fuzz_target;
use std::path::Path;

fuzz_target!(|text: &str| {
    let Ok(cfg) = RunConfig::parse(text, Path::new("/base")) else { return };
    let _ = cfg.check();
    let _ = cfg.run_name();
    assert!(cfg.dataset.is_absolute() && cfg.out_dir.is_absolute());
});
