use crate::fol::fold_name;
use crate::predarg::{parse_sections, Lexicon, LexiconError, DEFAULT_VOCAB};
use std::collections::BTreeSet;
use thiserror::Error;

/// Slot name used for color properties.
pub const COLOR_SLOT: &str = "color";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("vocabulary has no [colors] section")]
    NoColors,
    #[error("'{word}' appears more than once among property words")]
    DuplicateWord { word: String },
    #[error("template noun '{0}' is missing from [nouns]")]
    MissingNoun(String),
    #[error("template relation '{0}' is missing from [relations]")]
    MissingRelation(String),
}

/// An adjective slot; its position in [`Vocabulary::slots`] is its modifier
/// order, outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub words: Vec<String>,
}

/// Property words for generation plus the lexicon built from the same file.
/// Property words are lower-case and distinct across all slots, so a word
/// identifies its slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    pub colors: Vec<String>,
    pub slots: Vec<Slot>,
    pub lexicon: Lexicon,
}

impl Vocabulary {
    pub fn parse(text: &str) -> Result<Self, VocabError> {
        let sections = parse_sections(text)?;
        let lexicon = Lexicon::from_sections(&sections)?;
        let lower = |ws: &[String]| ws.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>();
        let colors = sections
            .iter()
            .find(|s| s.name == "colors")
            .map(|s| lower(&s.words))
            .filter(|c| !c.is_empty())
            .ok_or(VocabError::NoColors)?;
        let slots: Vec<Slot> = sections
            .iter()
            .filter_map(|s| {
                let name = s.name.strip_prefix("slot:")?.trim();
                Some(Slot { name: name.to_string(), words: lower(&s.words) })
            })
            .collect();

        let mut seen = BTreeSet::new();
        for w in colors.iter().chain(slots.iter().flat_map(|s| &s.words)) {
            if !seen.insert(fold_name(w)) {
                return Err(VocabError::DuplicateWord { word: w.clone() });
            }
        }
        for t in super::TEMPLATES.iter() {
            for noun in t.nouns() {
                if !lexicon.is_noun(noun) {
                    return Err(VocabError::MissingNoun(noun.to_string()));
                }
            }
            for r in t.relations {
                if !lexicon.is_relation(r.0) {
                    return Err(VocabError::MissingRelation(r.0.to_string()));
                }
            }
        }
        Ok(Vocabulary { colors, slots, lexicon })
    }

    pub fn default_vocab() -> Self {
        Self::parse(DEFAULT_VOCAB).expect("bundled vocabulary is well-formed")
    }

    /// Words of the named slot; [`COLOR_SLOT`] names the colors.
    pub fn slot_words(&self, slot: &str) -> Option<&[String]> {
        if slot == COLOR_SLOT {
            return Some(&self.colors);
        }
        self.slots.iter().find(|s| s.name == slot).map(|s| s.words.as_slice())
    }

    /// Modifier rank of a slot: adjective slots in file order, color last.
    pub fn slot_rank(&self, slot: &str) -> Option<usize> {
        if slot == COLOR_SLOT {
            return Some(self.slots.len());
        }
        self.slots.iter().position(|s| s.name == slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_vocab_shape() {
        let v = Vocabulary::default_vocab();
        assert_eq!(v.colors.len(), 8);
        assert_eq!(v.slots.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(), ["style", "condition"]);
        assert_eq!(v.slot_rank("color"), Some(2));
        for w in v.colors.iter().chain(v.slots.iter().flat_map(|s| &s.words)) {
            assert!(v.lexicon.is_unary(w), "{w}");
        }
    }

    #[test]
    fn rejects_bad_vocabularies() {
        let base = DEFAULT_VOCAB.replace("[slot:style]\nmodern", "[slot:style]\nred");
        assert_eq!(Vocabulary::parse(&base), Err(VocabError::DuplicateWord { word: "red".into() }));
        let no_jacket = DEFAULT_VOCAB.replace("jacket\n", "");
        assert_eq!(Vocabulary::parse(&no_jacket), Err(VocabError::MissingNoun("jacket".into())));
        let no_colors = DEFAULT_VOCAB.replace("[colors]", "[adjectives]");
        assert_eq!(Vocabulary::parse(&no_colors), Err(VocabError::NoColors));
    }
}
