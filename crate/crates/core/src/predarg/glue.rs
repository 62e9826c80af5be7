//! Dictionary segmentation of glued predicate names (`BigRedShiny`).

use super::Lexicon;
use crate::fol::fold_name;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("'{0}' has no segmentation into lexicon words")]
pub struct Unsplittable(pub String);

/// Splits at camel-case humps, letter/digit changes and `-`/`_`. An upper-case
/// run followed by a lower-case letter leaves its last capital to the next
/// chunk (`XMLHttp` -> `XML`, `Http`).
fn camel_chunks(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut chunks = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '-' || c == '_' {
            if !cur.is_empty() {
                chunks.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if let Some(&prev) = cur.chars().last().as_ref() {
            let next = chars.get(i + 1).copied();
            let boundary = (c.is_uppercase() && (prev.is_lowercase() || prev.is_ascii_digit()))
                || (c.is_ascii_digit() != prev.is_ascii_digit())
                || (c.is_uppercase() && prev.is_uppercase() && next.is_some_and(char::is_lowercase));
            if boundary {
                chunks.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    chunks
}

/// Segments `name` into the fewest lexicon words (case-insensitive) whose
/// boundaries fall on camel-case chunk boundaries. Among minimal covers the
/// longest-first greedy one wins. A name that is itself a lexicon word comes
/// back as a singleton with its original spelling.
pub fn split_glued(name: &str, lex: &Lexicon) -> Result<Vec<String>, Unsplittable> {
    if lex.is_unary(name) {
        return Ok(vec![name.to_string()]);
    }
    let chunks = camel_chunks(name);
    if chunks.is_empty() {
        return Err(Unsplittable(name.to_string()));
    }
    let folded: Vec<String> = chunks.iter().map(|c| fold_name(c)).collect();
    let max_word = lex.unary_words().map(|w| w.len()).max().unwrap_or(0);
    let n = chunks.len();

    // fewest[i]: minimal segment count covering chunks[i..], if any
    let mut fewest: Vec<Option<usize>> = vec![None; n + 1];
    fewest[n] = Some(0);
    for i in (0..n).rev() {
        let mut word = String::new();
        for j in i + 1..=n {
            word.push_str(&folded[j - 1]);
            if word.len() > max_word {
                break;
            }
            if let Some(rest) = fewest[j] {
                if lex.is_unary(&word) && fewest[i].is_none_or(|b| rest + 1 < b) {
                    fewest[i] = Some(rest + 1);
                }
            }
        }
    }
    if fewest[0].is_none() {
        return Err(Unsplittable(name.to_string()));
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let need = fewest[i].expect("reachable position") - 1;
        let j = (i + 1..=n)
            .rev()
            .find(|&j| fewest[j] == Some(need) && lex.is_unary(&folded[i..j].concat()))
            .expect("a minimal step exists");
        out.push(chunks[i..j].concat());
        i = j;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::default_lexicon()
    }

    #[test]
    fn empty_and_separator_only_names_are_unsplittable() {
        for name in ["", "-", "__"] {
            assert!(split_glued(name, &lex()).is_err(), "{name:?}");
        }
    }

    #[test]
    fn glued_examples() {
        assert_eq!(split_glued("BigRedShiny", &lex()).unwrap(), ["Big", "Red", "Shiny"]);
        assert_eq!(split_glued("BlueGlass", &lex()).unwrap(), ["Blue", "Glass"]);
        assert_eq!(split_glued("Car", &lex()).unwrap(), ["Car"]);
        assert_eq!(split_glued("DontMindIfImWhite", &lex()), Err(Unsplittable("DontMindIfImWhite".into())));
    }

    #[test]
    fn separators_and_case() {
        assert_eq!(split_glued("big_red", &lex()).unwrap(), ["big", "red"]);
        assert_eq!(split_glued("old-Car", &lex()).unwrap(), ["old", "Car"]);
        assert_eq!(split_glued("car", &lex()).unwrap(), ["car"]);
        // no hump, not a word
        assert!(split_glued("bigred", &lex()).is_err());
    }

    #[test]
    fn chunking() {
        assert_eq!(camel_chunks("XMLHttpRequest"), ["XML", "Http", "Request"]);
        assert_eq!(camel_chunks("Red2Car"), ["Red", "2", "Car"]);
        assert_eq!(camel_chunks("a--b"), ["a", "b"]);
        assert!(camel_chunks("").is_empty());
    }

    #[test]
    fn fewest_segments_preferred() {
        let lex = Lexicon::parse("[adjectives]\nblue\nglass\nblueglass\nb\nlue\n").unwrap();
        assert_eq!(split_glued("BlueGlassBlue", &lex).unwrap(), ["BlueGlass", "Blue"]);
        // longest-first among equal-length covers
        let lex = Lexicon::parse("[adjectives]\nab\nc\na\nbc\n").unwrap();
        assert_eq!(split_glued("A-B-C", &lex).unwrap(), ["AB", "C"]);
        assert_eq!(split_glued("AbC", &lex).unwrap(), ["Ab", "C"]);
    }

    #[test]
    fn concatenation_preserved() {
        for name in ["BigRedShiny", "VintageDirtyBlueCar", "big_red", "Glass"] {
            let parts = split_glued(name, &lex()).unwrap();
            assert_eq!(fold_name(&parts.concat()), fold_name(name));
        }
    }
}
