use super::template::{article_for, Property, Template};
use super::vocab::Vocabulary;
use crate::fol::fold_name;
use crate::predarg::PredArgStructure;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QType {
    Original,
    Modified,
    AndOriginal,
    AndModified,
}

impl QType {
    pub const ALL: [QType; 4] = [QType::Original, QType::Modified, QType::AndOriginal, QType::AndModified];

    pub fn as_str(self) -> &'static str {
        match self {
            QType::Original => "original",
            QType::Modified => "modified",
            QType::AndOriginal => "and-original",
            QType::AndModified => "and-modified",
        }
    }

    /// `original`/`and-original` ask "Was the NOUN PROP?"; the others ask
    /// "Was there a PROP NOUN?".
    pub fn is_original_frame(self) -> bool {
        matches!(self, QType::Original | QType::AndOriginal)
    }
}

impl fmt::Display for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Answer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" => Ok(Answer::Yes),
            "no" => Ok(Answer::No),
            _ => Err(format!("expected yes or no, got '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub qtype: QType,
    pub text: String,
    pub gold_answer: Answer,
}

/// What a question asks: every (noun, property) conjunct must hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuestionTarget {
    pub qtype: QType,
    pub conjuncts: Vec<(String, String)>,
}

/// A frame slot word: an ASCII letter, then letters, digits, `_` or `-`.
fn is_word(w: &str) -> bool {
    let mut b = w.bytes();
    b.next().is_some_and(|c| c.is_ascii_alphabetic()) && b.all(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'-')
}

fn is_article(w: &str) -> bool {
    w == "a" || w == "an"
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("question text matches no frame: {0:?}")]
    Unparseable(String),
    #[error("no entity is a '{0}'")]
    UnknownNoun(String),
}

/// Recovers the frame and conjuncts from a question's text.
pub fn parse_question(text: &str) -> Result<QuestionTarget, OracleError> {
    let text = text.trim();
    let unparseable = || OracleError::Unparseable(text.to_string());
    let body = text.strip_prefix("Was ").and_then(|b| b.strip_suffix('?')).ok_or_else(unparseable)?;
    let t: Vec<&str> = body.split(' ').collect();
    let pair = |noun: &str, prop: &str| (is_word(noun) && is_word(prop)).then(|| (noun.to_string(), prop.to_string()));
    let parsed = match t.as_slice() {
        ["the", n, p] => pair(n, p).map(|c| (QType::Original, vec![c])),
        ["there", a, p, n] if is_article(a) => pair(n, p).map(|c| (QType::Modified, vec![c])),
        ["the", n1, p1, "and", "the", n2, p2] => {
            pair(n1, p1).zip(pair(n2, p2)).map(|(x, y)| (QType::AndOriginal, vec![x, y]))
        }
        ["there", a1, p1, n1, "and", a2, p2, n2] if is_article(a1) && is_article(a2) => {
            pair(n1, p1).zip(pair(n2, p2)).map(|(x, y)| (QType::AndModified, vec![x, y]))
        }
        _ => None,
    };
    let (qtype, conjuncts) = parsed.ok_or_else(unparseable)?;
    Ok(QuestionTarget { qtype, conjuncts })
}

/// Model-free answer: yes iff every queried property is asserted of the
/// entity carrying the queried noun. Absent and negated properties are no.
pub fn gold_answer(q: &Question, s: &PredArgStructure) -> Result<Answer, OracleError> {
    answer_text(&q.text, s)
}

pub fn answer_text(text: &str, s: &PredArgStructure) -> Result<Answer, OracleError> {
    let target = parse_question(text)?;
    let mut all = true;
    for (noun, prop) in &target.conjuncts {
        let e = s.entity_with_noun(noun).ok_or_else(|| OracleError::UnknownNoun(noun.clone()))?;
        let p = fold_name(prop);
        all &= e.positive.contains(&p) && !e.negative.contains(&p);
    }
    Ok(Answer::from_bool(all))
}

pub fn original_text(noun: &str, prop: &str) -> String {
    format!("Was the {noun} {prop}?")
}

pub fn modified_text(noun: &str, prop: &str) -> String {
    format!("Was there {} {prop} {noun}?", article_for(prop))
}

/// Picks the property for a "no" question about `own`'s slot on an object
/// whose words are `mine`: the other object's word from the same slot, else
/// a random slot word neither object uses.
fn distractor<R: Rng>(own: &Property, other: &[Property], used: &[&str], vocab: &Vocabulary, rng: &mut R) -> String {
    if let Some(p) = other.iter().find(|p| p.slot == own.slot && !p.negated) {
        return p.word.clone();
    }
    let pool: Vec<&String> =
        vocab.slot_words(&own.slot).unwrap_or_default().iter().filter(|w| !used.contains(&w.as_str())).collect();
    pool.choose(rng).map(|w| (*w).clone()).unwrap_or_else(|| own.word.clone())
}

/// Questions for one instance.
///
/// Single-property datasets: for each property of each object, in order, one
/// (original, modified) pair. In pair `k` the modified question is the "yes"
/// one iff `k + phase` is even and the original question takes the other
/// label; a "yes" question asks about the property itself, a "no" question
/// about a [`distractor`]. A negated property (negation templates) yields a
/// pair of "no" questions about that property, its positive counterpart a
/// pair of "yes" questions.
///
/// `conjunctive`: two pairs of and-questions, true conjuncts then colors
/// swapped between the objects.
pub fn generate_questions<R: Rng>(
    instance_id: &str,
    template: &Template,
    props: &[Vec<Property>; 2],
    conjunctive: bool,
    phase: usize,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Vec<Question> {
    let mut out: Vec<Question> = Vec::new();
    let mut push = |qtype: QType, text: String, ans: bool| {
        let question_id = format!("{instance_id}-q{}", out.len());
        out.push(Question { question_id, qtype, text, gold_answer: Answer::from_bool(ans) });
    };
    let [n1, n2] = template.objects;

    if conjunctive {
        let color = |ps: &[Property]| {
            ps.iter().find(|p| p.slot == super::vocab::COLOR_SLOT).map(|p| p.word.clone()).unwrap_or_default()
        };
        let (c1, c2) = (color(&props[0]), color(&props[1]));
        for (a, b, truth) in [(&c1, &c2, true), (&c2, &c1, false)] {
            push(QType::AndOriginal, format!("Was the {n1} {a} and the {n2} {b}?"), truth);
            push(
                QType::AndModified,
                format!("Was there {} {a} {n1} and {} {b} {n2}?", article_for(a), article_for(b)),
                truth,
            );
        }
        return out;
    }

    let used: Vec<&str> = props.iter().flatten().map(|p| p.word.as_str()).collect();
    let mut k = 0;
    for (obj, noun) in [n1, n2].into_iter().enumerate() {
        for p in &props[obj] {
            if template.negation {
                push(QType::Original, original_text(noun, &p.word), !p.negated);
                push(QType::Modified, modified_text(noun, &p.word), !p.negated);
            } else {
                let modified_yes = (k + phase).is_multiple_of(2);
                let no_word = distractor(p, &props[1 - obj], &used, vocab, rng);
                let word = |yes: bool| if yes { p.word.as_str() } else { no_word.as_str() };
                push(QType::Original, original_text(noun, word(!modified_yes)), !modified_yes);
                push(QType::Modified, modified_text(noun, word(modified_yes)), modified_yes);
            }
            k += 1;
        }
    }
    out
}
