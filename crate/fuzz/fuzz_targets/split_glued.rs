#![no_main]

use argbind::fol::fold_name;
use argbind::predarg::{split_glued, Lexicon};
use libfuzzer_sys::fuzz_target;
use std::sync::LazyLock;

static LEXICON: LazyLock<Lexicon> = LazyLock::new(Lexicon::default_lexicon);

fuzz_target!(|name: &str| {
    if let Ok(parts) = split_glued(name, &LEXICON) {
        assert!(!parts.is_empty());
        assert_eq!(fold_name(&parts.concat()), fold_name(name));
    }
});
