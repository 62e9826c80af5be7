use super::{split_glued, Lexicon};
use crate::fol::{canonical_var_name, fold_name, Atom, Defect, Literal, PrenexConjunction, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Entity bijection searches are capped at this many entities.
pub const MAX_ENTITIES: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0 + 1)
    }
}

/// One quantified individual with its unary predicates. All names are
/// folded; nouns are also members of `positive`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EntityBinding {
    pub id: EntityId,
    pub noun: BTreeSet<String>,
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Entity(EntityId),
    Const(String),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Entity(e) => write!(f, "{e}"),
            Arg::Const(c) => f.write_str(c),
        }
    }
}

/// A relation instance. Argument order is significant. Unary predicates over
/// constants also land here, with a single argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub predicate: String,
    pub args: Vec<Arg>,
    pub negated: bool,
}

impl Relation {
    pub fn new(predicate: &str, args: Vec<Arg>) -> Self {
        Relation { predicate: fold_name(predicate), args, negated: false }
    }

    pub(crate) fn remap(&self, map: &dyn Fn(EntityId) -> Option<EntityId>) -> Option<Relation> {
        let args = self
            .args
            .iter()
            .map(|a| match a {
                Arg::Entity(e) => map(*e).map(Arg::Entity),
                Arg::Const(c) => Some(Arg::Const(c.clone())),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Relation { predicate: self.predicate.clone(), args, negated: self.negated })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("¬")?;
        }
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// The extraction target. `unsplittable` and `repaired` record what glue
/// repair saw; they do not take part in [`structures_equal`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PredArgStructure {
    pub entities: Vec<EntityBinding>,
    pub relations: BTreeSet<Relation>,
    pub constants: BTreeSet<String>,
    pub unsplittable: BTreeSet<String>,
    pub repaired: bool,
}

impl PredArgStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entity carrying `noun` and the given properties.
    pub fn add_entity<'a>(
        &mut self,
        noun: &str,
        positive: impl IntoIterator<Item = &'a str>,
        negative: impl IntoIterator<Item = &'a str>,
    ) -> EntityId {
        let id = EntityId(self.entities.len());
        let noun = fold_name(noun);
        let mut pos: BTreeSet<String> = positive.into_iter().map(fold_name).collect();
        pos.insert(noun.clone());
        self.entities.push(EntityBinding {
            id,
            noun: BTreeSet::from([noun]),
            positive: pos,
            negative: negative.into_iter().map(fold_name).collect(),
        });
        id
    }

    pub fn add_relation(&mut self, predicate: &str, args: Vec<Arg>) {
        for a in &args {
            if let Arg::Const(c) = a {
                self.constants.insert(c.clone());
            }
        }
        self.relations.insert(Relation::new(predicate, args));
    }

    pub fn entity(&self, id: EntityId) -> Option<&EntityBinding> {
        self.entities.get(id.0)
    }

    /// First entity whose noun set contains `noun` (folded).
    pub fn entity_with_noun(&self, noun: &str) -> Option<&EntityBinding> {
        let n = fold_name(noun);
        self.entities.iter().find(|e| e.noun.contains(&n))
    }

    /// Every folded predicate name: unary (both polarities) and relational.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        let mut v = BTreeSet::new();
        for e in &self.entities {
            v.extend(e.positive.iter().cloned());
            v.extend(e.negative.iter().cloned());
        }
        v.extend(self.relations.iter().map(|r| r.predicate.clone()));
        v
    }
}

impl fmt::Display for PredArgStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entities.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}{{", e.id)?;
            let mut first = true;
            for p in &e.positive {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                f.write_str(p)?;
            }
            for p in &e.negative {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "¬{p}")?;
            }
            f.write_str("}")?;
        }
        for r in &self.relations {
            write!(f, "; {r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractFailure {
    #[error("formula is outside the prenex-conjunctive fragment: {0:?}")]
    Defective(Vec<Defect>),
    #[error("entity {entity} has both {predicate} and its negation")]
    Contradiction { entity: EntityId, predicate: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Repair {
    On,
    #[default]
    Off,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0} entities exceed the bijection cap of {MAX_ENTITIES}")]
pub struct TooManyEntities(pub usize);

/// Rewrites every atom argument that is a lexicon noun constant (`BigRedShiny(Car)`)
/// to a fresh variable carrying that noun (`BigRedShiny(v) ∧ Car(v)`). Other
/// constants such as `they` stay. Idempotent.
pub fn normalize_noun_argument(pc: &PrenexConjunction, lex: &Lexicon) -> PrenexConjunction {
    let mut taken: BTreeSet<String> = pc.vars.iter().cloned().collect();
    for l in &pc.literals {
        for t in &l.atom.args {
            if let Term::Var(v) = t {
                taken.insert(v.clone());
            }
        }
    }
    let mut fresh: BTreeMap<String, String> = BTreeMap::new();
    let mut out = pc.clone();
    let mut next = 0;
    let mut added = Vec::new();
    for lit in &mut out.literals {
        for t in &mut lit.atom.args {
            let Term::Const(c) = t else { continue };
            if !lex.is_noun(c) {
                continue;
            }
            let var = match fresh.get(c) {
                Some(v) => v.clone(),
                None => {
                    let v = loop {
                        let cand = canonical_var_name(next);
                        next += 1;
                        if !taken.contains(&cand) {
                            break cand;
                        }
                    };
                    taken.insert(v.clone());
                    fresh.insert(c.clone(), v.clone());
                    out.vars.push(v.clone());
                    added.push(Literal::positive(Atom::new(c.clone(), vec![Term::var(&v)])));
                    v
                }
            };
            *t = Term::Var(var);
        }
    }
    if added.is_empty() {
        return out;
    }
    out.literals.extend(added);
    out.sort_literals();
    out
}

/// Builds the predicate-argument structure of a defect-free canonical
/// formula: one entity per quantified variable, unary literals as
/// properties, everything else as relations.
///
/// With [`Repair::On`], noun-argument forms are normalized first and every
/// unary predicate name goes through [`split_glued`]; names without a
/// segmentation are kept verbatim and listed in `unsplittable`.
pub fn extract_structure(
    pc: &PrenexConjunction,
    lex: &Lexicon,
    repair: Repair,
) -> Result<PredArgStructure, ExtractFailure> {
    if !pc.defects.is_empty() {
        return Err(ExtractFailure::Defective(pc.defects.clone()));
    }
    let has_noun_constant =
        || pc.literals.iter().flat_map(|l| &l.atom.args).any(|t| matches!(t, Term::Const(c) if lex.is_noun(c)));
    let normalized = (repair == Repair::On && has_noun_constant()).then(|| normalize_noun_argument(pc, lex));
    let mut s = PredArgStructure::new();
    let pc = match &normalized {
        Some(n) => {
            s.repaired = n != pc;
            n
        }
        None => pc,
    };
    let index: BTreeMap<&str, EntityId> = pc.vars.iter().enumerate().map(|(i, v)| (v.as_str(), EntityId(i))).collect();
    s.entities = (0..pc.vars.len()).map(|i| EntityBinding { id: EntityId(i), ..Default::default() }).collect();

    for lit in &pc.literals {
        let args: Vec<Arg> = lit
            .atom
            .args
            .iter()
            .map(|t| match t {
                // defect-free: every variable is quantified
                Term::Var(v) => Arg::Entity(index[v.as_str()]),
                Term::Const(c) => Arg::Const(c.clone()),
            })
            .collect();
        match args.as_slice() {
            [Arg::Entity(e)] => {
                let names = if repair == Repair::On {
                    match split_glued(&lit.atom.predicate, lex) {
                        Ok(parts) => {
                            if parts.len() > 1 {
                                s.repaired = true;
                            }
                            parts
                        }
                        Err(_) => {
                            s.unsplittable.insert(lit.atom.predicate.clone());
                            vec![lit.atom.predicate.clone()]
                        }
                    }
                } else {
                    vec![lit.atom.predicate.clone()]
                };
                let ent = &mut s.entities[e.0];
                for n in names {
                    let folded = fold_name(&n);
                    if lex.is_noun(&folded) {
                        ent.noun.insert(folded.clone());
                    }
                    if lit.negated {
                        ent.negative.insert(folded);
                    } else {
                        ent.positive.insert(folded);
                    }
                }
            }
            _ => {
                for a in &args {
                    if let Arg::Const(c) = a {
                        s.constants.insert(c.clone());
                    }
                }
                s.relations.insert(Relation { predicate: fold_name(&lit.atom.predicate), args, negated: lit.negated });
            }
        }
    }
    for e in &s.entities {
        if let Some(p) = e.positive.intersection(&e.negative).next() {
            return Err(ExtractFailure::Contradiction { entity: e.id, predicate: p.clone() });
        }
    }
    Ok(s)
}

/// Entities compare as (positive, negative) name sets.
fn entity_key(e: &EntityBinding) -> (&BTreeSet<String>, &BTreeSet<String>) {
    (&e.positive, &e.negative)
}

/// True iff some bijection of entity ids makes the entities (positive and
/// negative name sets) and the relation sets coincide.
pub fn structures_equal(a: &PredArgStructure, b: &PredArgStructure) -> Result<bool, TooManyEntities> {
    let n = a.entities.len();
    if n > MAX_ENTITIES || b.entities.len() > MAX_ENTITIES {
        return Err(TooManyEntities(n.max(b.entities.len())));
    }
    if n != b.entities.len() || a.relations.len() != b.relations.len() {
        return Ok(false);
    }
    let candidates: Vec<Vec<usize>> = a
        .entities
        .iter()
        .map(|ea| (0..n).filter(|&j| entity_key(ea) == entity_key(&b.entities[j])).collect())
        .collect();
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(search(0, &candidates, &mut mapping, &mut used, a, b))
}

fn search(
    i: usize,
    candidates: &[Vec<usize>],
    mapping: &mut [usize],
    used: &mut [bool],
    a: &PredArgStructure,
    b: &PredArgStructure,
) -> bool {
    if i == mapping.len() {
        let map = |e: EntityId| Some(EntityId(mapping[e.0]));
        return a.relations.iter().all(|r| r.remap(&map).is_some_and(|m| b.relations.contains(&m)));
    }
    for &j in &candidates[i] {
        if !used[j] {
            used[j] = true;
            mapping[i] = j;
            if search(i + 1, candidates, mapping, used, a, b) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}
