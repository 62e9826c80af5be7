//! Word lists used for glue repair, noun classification and the vocabulary
//! of generated sentences.
//!
//! File format: plain text, one word per line, grouped under section headers
//! `[nouns]`, `[adjectives]`, `[colors]`, `[relations]` and any number of
//! `[slot:NAME]` adjective slots. `#` starts a comment line.

use crate::fol::fold_name;
use std::collections::BTreeSet;
use thiserror::Error;

pub const DEFAULT_VOCAB: &str = include_str!("../../data/default.vocab");

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("lexicon has no unary words")]
    Empty,
}

/// One `[header]` block in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub words: Vec<String>,
}

/// Splits a lexicon/vocabulary file into sections. Words must be identifiers
/// (letters, digits, hyphens, underscores; leading letter).
pub fn parse_sections(text: &str) -> Result<Vec<Section>, LexiconError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| LexiconError::Syntax { line: i + 1, message };
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| err(format!("unterminated header {line:?}")))?;
            let name = name.trim();
            let known = matches!(name, "nouns" | "adjectives" | "colors" | "relations")
                || name.strip_prefix("slot:").is_some_and(|s| !s.trim().is_empty());
            if !known {
                return Err(err(format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(err(format!("duplicate section [{name}]")));
            }
            sections.push(Section { name: name.to_string(), words: Vec::new() });
            continue;
        }
        let Some(current) = sections.last_mut() else {
            return Err(err("word before any section header".into()));
        };
        let mut cs = line.chars();
        let valid =
            cs.next().is_some_and(char::is_alphabetic) && cs.all(|c| c.is_alphanumeric() || c == '-' || c == '_');
        if !valid {
            return Err(err(format!("not a word: {line:?}")));
        }
        current.words.push(line.to_string());
    }
    Ok(sections)
}

/// Known predicate words, all stored under [`fold_name`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lexicon {
    pub nouns: BTreeSet<String>,
    pub adjectives: BTreeSet<String>,
    pub colors: BTreeSet<String>,
    pub relations: BTreeSet<String>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        Self::from_sections(&parse_sections(text)?)
    }

    pub fn from_sections(sections: &[Section]) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        for s in sections {
            let target = match s.name.as_str() {
                "nouns" => &mut lex.nouns,
                "colors" => &mut lex.colors,
                "relations" => &mut lex.relations,
                _ => &mut lex.adjectives, // adjectives and slot:*
            };
            target.extend(s.words.iter().map(|w| fold_name(w)));
        }
        if lex.nouns.is_empty() && lex.adjectives.is_empty() && lex.colors.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(lex)
    }

    /// The lexicon shipped with the default vocabulary.
    pub fn default_lexicon() -> Self {
        Self::parse(DEFAULT_VOCAB).expect("bundled vocabulary is well-formed")
    }

    pub fn is_unary(&self, word: &str) -> bool {
        let w = fold_name(word);
        self.nouns.contains(&w) || self.adjectives.contains(&w) || self.colors.contains(&w)
    }

    pub fn is_noun(&self, word: &str) -> bool {
        self.nouns.contains(&fold_name(word))
    }

    pub fn is_relation(&self, word: &str) -> bool {
        self.relations.contains(&fold_name(word))
    }

    pub fn unary_words(&self) -> impl Iterator<Item = &String> {
        self.nouns.iter().chain(&self.adjectives).chain(&self.colors)
    }
}
