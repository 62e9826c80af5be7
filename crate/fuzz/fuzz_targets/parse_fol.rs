#![no_main]

use argbind::fol::{parse_fol, render_fol, Style};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(f) = parse_fol(text) else { return };
    for style in [Style::Unicode, Style::Ascii] {
        let printed = render_fol(&f, style);
        assert_eq!(parse_fol(&printed).as_ref(), Ok(&f), "{printed}");
    }
});
