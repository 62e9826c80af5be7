use super::question::{generate_questions, Question};
use super::template::{instantiate, Family, Instantiated, Property, SlotMismatch, Template, TEMPLATES};
use super::vocab::Vocabulary;
use crate::fol::{render_fol, Style};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DatasetId {
    D11,
    D21,
    D22,
    D31,
    D32,
    D33,
    Dand,
}

impl DatasetId {
    pub const ALL: [DatasetId; 7] = [
        DatasetId::D11,
        DatasetId::D21,
        DatasetId::D22,
        DatasetId::D31,
        DatasetId::D32,
        DatasetId::D33,
        DatasetId::Dand,
    ];

    /// Property counts (i, j) of the two objects.
    pub fn dims(self) -> (usize, usize) {
        match self {
            DatasetId::D11 | DatasetId::Dand => (1, 1),
            DatasetId::D21 => (2, 1),
            DatasetId::D22 => (2, 2),
            DatasetId::D31 => (3, 1),
            DatasetId::D32 => (3, 2),
            DatasetId::D33 => (3, 3),
        }
    }

    pub fn is_conjunctive(self) -> bool {
        self == DatasetId::Dand
    }

    /// Questions per instance: 2(i+j), or 4 and-questions.
    pub fn questions_per_instance(self) -> usize {
        let (i, j) = self.dims();
        if self.is_conjunctive() {
            4
        } else {
            2 * (i + j)
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetId::D11 => "D11",
            DatasetId::D21 => "D21",
            DatasetId::D22 => "D22",
            DatasetId::D31 => "D31",
            DatasetId::D32 => "D32",
            DatasetId::D33 => "D33",
            DatasetId::Dand => "Dand",
        }
    }

    /// Templates the dataset draws from. Multi-property datasets use the
    /// base templates only; the conjunctive dataset leaves out the negation
    /// templates, whose first object has no true property to conjoin.
    pub fn templates(self) -> impl Iterator<Item = &'static Template> {
        let (i, j) = self.dims();
        TEMPLATES.iter().filter(move |t| match self {
            DatasetId::Dand => !t.negation,
            _ if i > 1 || j > 1 => t.multiprop,
            _ => true,
        })
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| !matches!(c, ',' | '_' | ' ')).collect::<String>().to_lowercase();
        DatasetId::ALL
            .into_iter()
            .find(|d| d.as_str().to_lowercase() == key)
            .ok_or_else(|| format!("unknown dataset '{s}' (expected one of D11 D21 D22 D31 D32 D33 Dand)"))
    }
}

impl From<DatasetId> for String {
    fn from(d: DatasetId) -> String {
        d.as_str().to_string()
    }
}

impl TryFrom<String> for DatasetId {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Count {
    #[default]
    All,
    N(usize),
}

impl FromStr for Count {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Count::All);
        }
        s.parse().map(Count::N).map_err(|_| format!("count must be 'all' or a number, got '{s}'"))
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::All => f.write_str("all"),
            Count::N(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub dataset: DatasetId,
    pub seed: u64,
    pub count: Count,
    /// Restrict to these template families.
    pub families: Option<BTreeSet<Family>>,
}

impl GenSpec {
    pub fn new(dataset: DatasetId, seed: u64, count: Count) -> Self {
        GenSpec { dataset, seed, count, families: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("vocabulary too small for {dataset}: {reason}")]
    VocabularyTooSmall { dataset: DatasetId, reason: String },
    #[error("{dataset} has an odd number of question pairs per instance, so a balanced dataset needs an even count (got {count})")]
    UnbalancedCount { dataset: DatasetId, count: usize },
    #[error(transparent)]
    Slot(#[from] SlotMismatch),
}

/// One generated sentence with its questions. Serialized as one JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: String,
    pub dataset: DatasetId,
    pub template_id: String,
    pub surface: String,
    /// Unicode notation.
    pub gold_fol: String,
    pub questions: Vec<Question>,
    /// Property words of the two objects.
    pub props: [Vec<Property>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RebuildError {
    #[error("unknown template '{0}'")]
    UnknownTemplate(String),
    #[error(transparent)]
    Slot(#[from] SlotMismatch),
}

impl Instance {
    pub fn template(&self) -> Option<&'static Template> {
        Template::by_id(&self.template_id)
    }

    /// Re-fills the template from `props`; the structure it carries is the
    /// reference for validation.
    pub fn rebuild(&self) -> Result<Instantiated, RebuildError> {
        let t = self.template().ok_or_else(|| RebuildError::UnknownTemplate(self.template_id.clone()))?;
        Ok(instantiate(t, &self.props)?)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every property list with one color and `k - 1` adjectives from distinct
/// slots, avoiding `taken` words. Order: slot subset, color, adjective words.
/// Lists are in modifier order (adjective slots, then color).
fn assignments(vocab: &Vocabulary, k: usize, taken: &[&str]) -> Vec<Vec<Property>> {
    let free = |ws: &[String]| -> Vec<String> { ws.iter().filter(|w| !taken.contains(&w.as_str())).cloned().collect() };
    let mut out = Vec::new();
    for subset in combinations(vocab.slots.len(), k - 1) {
        for color in free(&vocab.colors) {
            let mut partial: Vec<Vec<Property>> = vec![Vec::new()];
            for &si in &subset {
                let slot = &vocab.slots[si];
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        free(&slot.words).into_iter().map(move |w| {
                            let mut q = p.clone();
                            q.push(Property::new(&slot.name, &w));
                            q
                        })
                    })
                    .collect();
            }
            for mut p in partial {
                p.push(Property::color(&color));
                out.push(p);
            }
        }
    }
    out
}

fn object_pairs(vocab: &Vocabulary, i: usize, j: usize) -> Vec<[Vec<Property>; 2]> {
    let mut out = Vec::new();
    for a in assignments(vocab, i, &[]) {
        let taken: Vec<&str> = a.iter().map(|p| p.word.as_str()).collect();
        for b in assignments(vocab, j, &taken) {
            out.push([a.clone(), b]);
        }
    }
    out
}

fn negation_pairs(vocab: &Vocabulary) -> Vec<[Vec<Property>; 2]> {
    vocab.colors.iter().map(|c| [vec![Property::color(c).negated()], vec![Property::color(c)]]).collect()
}

fn check_vocab(dataset: DatasetId, vocab: &Vocabulary) -> Result<(), GenError> {
    let small = |reason: String| Err(GenError::VocabularyTooSmall { dataset, reason });
    if vocab.colors.len() < 2 {
        return small(format!("{} color(s); need 2", vocab.colors.len()));
    }
    let (i, j) = dataset.dims();
    let need = i.max(j) - 1;
    if vocab.slots.len() < need {
        return small(format!("{} adjective slot(s); need {need}", vocab.slots.len()));
    }
    if need > 0 {
        if let Some(s) = vocab.slots.iter().find(|s| s.words.len() < 2) {
            return small(format!("slot '{}' has {} word(s); need 2", s.name, s.words.len()));
        }
    }
    Ok(())
}

fn instance_rng(dataset: DatasetId, template: &str, ordinal: usize, seed: u64) -> ChaCha8Rng {
    let digest = Sha256::digest(format!("{dataset}|{template}|{ordinal}|{seed}").as_bytes());
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(key)
}

/// The full instance space of a dataset in canonical order, as
/// (template, property pair) slices.
struct Space<'a> {
    blocks: Vec<(&'static Template, &'a [[Vec<Property>; 2]])>,
}

impl Space<'_> {
    fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.1.len()).sum()
    }

    fn get(&self, mut idx: usize) -> (&'static Template, &[Vec<Property>; 2]) {
        for (t, pairs) in &self.blocks {
            if idx < pairs.len() {
                return (t, &pairs[idx]);
            }
            idx -= pairs.len();
        }
        unreachable!("index within space")
    }
}

/// Generates a dataset. Deterministic in (spec, vocabulary): `Count::All`
/// enumerates templates in table order and, per template, every property
/// assignment; `Count::N` draws a seeded sample of that space and keeps
/// canonical order.
pub fn generate_dataset(spec: &GenSpec, vocab: &Vocabulary) -> Result<Vec<Instance>, GenError> {
    let dataset = spec.dataset;
    check_vocab(dataset, vocab)?;
    let (i, j) = dataset.dims();
    let regular = object_pairs(vocab, i, j);
    let negation = negation_pairs(vocab);
    let space = Space {
        blocks: dataset
            .templates()
            .filter(|t| spec.families.as_ref().is_none_or(|fs| fs.contains(&t.family)))
            .map(|t| (t, if t.negation { &negation[..] } else { &regular[..] }))
            .collect(),
    };
    let total = space.len();
    let picks: Vec<usize> = match spec.count {
        Count::All => (0..total).collect(),
        Count::N(n) if n > total => {
            return Err(GenError::VocabularyTooSmall {
                dataset,
                reason: format!("{n} instances requested; only {total} distinct ones exist"),
            })
        }
        Count::N(n) => {
            let digest = Sha256::digest(format!("{dataset}|sample|{}", spec.seed).as_bytes());
            let mut key = [0u8; 32];
            key.copy_from_slice(&digest[..32]);
            let mut rng = ChaCha8Rng::from_seed(key);
            let mut v = rand::seq::index::sample(&mut rng, total, n).into_vec();
            v.sort_unstable();
            v
        }
    };
    if (i + j) % 2 == 1 && picks.len() % 2 == 1 {
        return Err(GenError::UnbalancedCount { dataset, count: picks.len() });
    }

    let mut out = Vec::with_capacity(picks.len());
    for (ordinal, idx) in picks.into_iter().enumerate() {
        let (t, props) = space.get(idx);
        let filled = instantiate(t, props)?;
        let instance_id = format!("{dataset}-{ordinal:06}");
        let mut rng = instance_rng(dataset, t.id, ordinal, spec.seed);
        let questions =
            generate_questions(&instance_id, t, props, dataset.is_conjunctive(), ordinal % 2, vocab, &mut rng);
        out.push(Instance {
            instance_id,
            dataset,
            template_id: t.id.to_string(),
            surface: filled.surface,
            gold_fol: render_fol(&filled.gold, Style::Unicode),
            questions,
            props: props.clone(),
        });
    }
    Ok(out)
}
