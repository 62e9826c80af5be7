#![no_main]

use argbind::fol::{alpha_equivalent, canonicalize, formulas_match, parse_fol, MatchPolicy, MAX_BIJECTION_VARS};
use argbind::predarg::{classify_errors, extract_structure, Lexicon, Repair};
use libfuzzer_sys::fuzz_target;
use std::sync::LazyLock;

static LEXICON: LazyLock<Lexicon> = LazyLock::new(Lexicon::default_lexicon);

fuzz_target!(|text: &str| {
    let Ok(f) = parse_fol(text) else { return };
    let pc = canonicalize(&f);
    assert_eq!(pc, canonicalize(&f));
    if pc.is_defect_free() && pc.vars.len() <= MAX_BIJECTION_VARS {
        assert_eq!(alpha_equivalent(&pc, &pc), Ok(true));
        assert!(formulas_match(&f, &f, MatchPolicy::Canonical).is_match());
    }
    assert!(formulas_match(&f, &f, MatchPolicy::StrictString).is_match());
    for repair in [Repair::Off, Repair::On] {
        let s = extract_structure(&pc, &LEXICON, repair);
        if let Ok(s) = &s {
            assert!(!classify_errors(Ok(s), s).has_errors());
        }
    }
});
