#![no_main]

use argbind::datagen::Vocabulary;
use argbind::predarg::Lexicon;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = Lexicon::parse(text);
    if let Ok(v) = Vocabulary::parse(text) {
        for w in v.lexicon.unary_words() {
            assert!(v.lexicon.is_unary(w));
        }
    }
});
