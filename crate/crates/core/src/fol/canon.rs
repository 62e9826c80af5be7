use super::{canonical_var_name, fold_name, parse_fol, render_fol, Atom, Formula, Literal, Style, SyntaxError, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Bijection searches above this many variables are refused.
pub const MAX_BIJECTION_VARS: usize = 8;

/// Structure outside the prenex-conjunctive fragment. Defects are reported,
/// not fatal: canonicalization still extracts what it can.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Defect {
    /// A variable used in an atom with no enclosing quantifier.
    FreeVariable(String),
    /// A quantifier below a conjunction or negation; it was hoisted.
    NonPrenex(String),
    /// Negation over something other than an atom; its content was dropped.
    NonConjunctive(String),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::FreeVariable(v) => write!(f, "free variable {v}"),
            Defect::NonPrenex(v) => write!(f, "non-prenex quantifier over {v}"),
            Defect::NonConjunctive(what) => write!(f, "non-conjunctive structure: {what}"),
        }
    }
}

/// Canonical form: quantified variables in order of first use plus a sorted
/// literal multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrenexConjunction {
    pub vars: Vec<String>,
    pub literals: Vec<Literal>,
    pub defects: Vec<Defect>,
}

impl PrenexConjunction {
    pub fn is_defect_free(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn to_formula(&self) -> Formula {
        let body = if self.literals.is_empty() {
            // no atoms at all; keep something parseable
            Formula::And(Vec::new())
        } else {
            Formula::and(self.literals.iter().cloned().map(Formula::literal).collect())
        };
        Formula::exists_all(&self.vars, body)
    }

    pub fn render(&self, style: Style) -> String {
        render_fol(&self.to_formula(), style)
    }

    pub fn sort_literals(&mut self) {
        self.literals.sort();
    }
}

/// Variable identity during the walk: a quantifier occurrence, or a free name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum VarRef {
    Bound(usize),
    Free(String),
}

struct Walker<'a> {
    binders: usize,
    literals: Vec<(&'a Atom, Vec<Option<VarRef>>, bool)>,
    defects: Vec<Defect>,
}

impl<'a> Walker<'a> {
    fn resolve(&mut self, atom: &Atom, scope: &[(&str, usize)]) -> Vec<Option<VarRef>> {
        atom.args
            .iter()
            .map(|t| match t {
                Term::Var(name) => Some(match scope.iter().rev().find(|(n, _)| *n == name) {
                    Some(&(_, id)) => VarRef::Bound(id),
                    None => {
                        let d = Defect::FreeVariable(name.clone());
                        if !self.defects.contains(&d) {
                            self.defects.push(d);
                        }
                        VarRef::Free(name.clone())
                    }
                }),
                Term::Const(_) => None,
            })
            .collect()
    }

    fn walk(&mut self, f: &'a Formula, scope: &mut Vec<(&'a str, usize)>, in_prefix: bool) {
        match f {
            Formula::Exists { var, body } => {
                if !in_prefix {
                    self.defects.push(Defect::NonPrenex(var.clone()));
                }
                let id = self.binders;
                self.binders += 1;
                scope.push((var, id));
                self.walk(body, scope, in_prefix);
                scope.pop();
            }
            Formula::And(cs) => {
                for c in cs {
                    self.walk(c, scope, false);
                }
            }
            Formula::Atom(a) => {
                let refs = self.resolve(a, scope);
                self.literals.push((a, refs, false));
            }
            Formula::Not(body) => match &**body {
                Formula::Atom(a) => {
                    let refs = self.resolve(a, scope);
                    self.literals.push((a, refs, true));
                }
                Formula::Not(inner) => self.walk(inner, scope, false),
                Formula::And(_) => {
                    self.defects.push(Defect::NonConjunctive("negated conjunction".into()));
                }
                Formula::Exists { var, .. } => {
                    self.defects.push(Defect::NonConjunctive(format!("negated quantifier over {var}")));
                }
            },
        }
    }
}

/// Reduces `f` to prenex-conjunctive form. Leading quantifiers are hoisted,
/// conjunctions flattened and negation pushed onto atoms (double negation
/// cancels). Anything outside the fragment is recorded in `defects` while the
/// remaining conjunctive content is still extracted. Bound variables are
/// renamed x, y, z, x1, ... in order of first occurrence.
pub fn canonicalize(f: &Formula) -> PrenexConjunction {
    let mut w = Walker { binders: 0, literals: Vec::new(), defects: Vec::new() };
    w.walk(f, &mut Vec::new(), true);

    let mut order: Vec<usize> = Vec::new();
    for (_, refs, _) in &w.literals {
        for r in refs.iter().flatten() {
            if let VarRef::Bound(id) = r {
                if !order.contains(id) {
                    order.push(*id);
                }
            }
        }
    }
    for id in 0..w.binders {
        if !order.contains(&id) {
            order.push(id);
        }
    }

    let free: BTreeSet<&str> = w
        .defects
        .iter()
        .filter_map(|d| match d {
            Defect::FreeVariable(v) => Some(v.as_str()),
            _ => None,
        })
        .collect();
    let mut names = vec![String::new(); w.binders];
    let mut vars = Vec::with_capacity(w.binders);
    let mut next = 0;
    for id in order {
        let name = loop {
            let candidate = canonical_var_name(next);
            next += 1;
            if !free.contains(candidate.as_str()) {
                break candidate;
            }
        };
        names[id] = name.clone();
        vars.push(name);
    }

    let mut literals: Vec<Literal> = w
        .literals
        .into_iter()
        .map(|(atom, refs, negated)| {
            let args = atom
                .args
                .iter()
                .zip(refs)
                .map(|(t, r)| match r {
                    Some(VarRef::Bound(id)) => Term::Var(names[id].clone()),
                    Some(VarRef::Free(n)) => Term::Var(n),
                    None => t.clone(),
                })
                .collect();
            Literal { atom: Atom { predicate: atom.predicate.clone(), args }, negated }
        })
        .collect();
    literals.sort();
    PrenexConjunction { vars, literals, defects: w.defects }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("{0} variables exceed the bijection cap of {MAX_BIJECTION_VARS}")]
    TooManyVariables(usize),
    #[error("formula has defects: {0:?}")]
    DefectiveFormula(Vec<Defect>),
}

/// Argument after variable erasure: a variable slot index or a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Slot {
    Var(usize),
    Const(String),
}

type LitKey = (String, bool, Vec<Slot>);

fn literal_keys(pc: &PrenexConjunction) -> Vec<LitKey> {
    let index: HashMap<&str, usize> = pc.vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    pc.literals
        .iter()
        .map(|l| {
            let args = l
                .atom
                .args
                .iter()
                .map(|t| match t {
                    // defect-free means every variable is in `vars`
                    Term::Var(v) => Slot::Var(index[v.as_str()]),
                    Term::Const(c) => Slot::Const(c.clone()),
                })
                .collect();
            (fold_name(&l.atom.predicate), l.negated, args)
        })
        .collect()
}

/// Per-variable signature invariant under renaming: the sorted multiset of
/// (predicate, polarity, arity, position) occurrences.
fn signatures(n: usize, keys: &[LitKey]) -> Vec<Vec<(String, bool, usize, usize)>> {
    let mut sigs = vec![Vec::new(); n];
    for (pred, neg, args) in keys {
        for (pos, a) in args.iter().enumerate() {
            if let Slot::Var(v) = a {
                sigs[*v].push((pred.clone(), *neg, args.len(), pos));
            }
        }
    }
    for s in &mut sigs {
        s.sort();
    }
    sigs
}

fn check_inputs(pc: &PrenexConjunction) -> Result<(), EquivError> {
    if !pc.defects.is_empty() {
        return Err(EquivError::DefectiveFormula(pc.defects.clone()));
    }
    if pc.vars.len() > MAX_BIJECTION_VARS {
        return Err(EquivError::TooManyVariables(pc.vars.len()));
    }
    Ok(())
}

/// True iff some bijection between the variable lists maps `a`'s literal
/// multiset onto `b`'s. Predicate names compare under [`fold_name`];
/// constants compare literally.
pub fn alpha_equivalent(a: &PrenexConjunction, b: &PrenexConjunction) -> Result<bool, EquivError> {
    check_inputs(a)?;
    check_inputs(b)?;
    if a.vars.len() != b.vars.len() || a.literals.len() != b.literals.len() {
        return Ok(false);
    }
    // the identity bijection
    if a.vars == b.vars && a.literals == b.literals {
        return Ok(true);
    }
    let n = a.vars.len();
    let ka = literal_keys(a);
    let kb = literal_keys(b);
    let mut target = kb.clone();
    target.sort();

    let sa = signatures(n, &ka);
    let sb = signatures(n, &kb);
    // candidates[i]: variables of b that variable i of a may map to
    let candidates: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| sa[i] == sb[j]).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(false);
    }

    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(search(0, &candidates, &mut mapping, &mut used, &ka, &target))
}

fn search(
    i: usize,
    candidates: &[Vec<usize>],
    mapping: &mut [usize],
    used: &mut [bool],
    ka: &[LitKey],
    target: &[LitKey],
) -> bool {
    if i == mapping.len() {
        let mut mapped: Vec<LitKey> = ka
            .iter()
            .map(|(p, neg, args)| {
                let args = args
                    .iter()
                    .map(|s| match s {
                        Slot::Var(v) => Slot::Var(mapping[*v]),
                        c => c.clone(),
                    })
                    .collect();
                (p.clone(), *neg, args)
            })
            .collect();
        mapped.sort();
        return mapped == target;
    }
    for &j in &candidates[i] {
        if !used[j] {
            used[j] = true;
            mapping[i] = j;
            if search(i + 1, candidates, mapping, used, ka, target) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchPolicy {
    /// Whitespace-normalized rendering comparison.
    StrictString,
    /// Canonicalization plus alpha-equivalence.
    #[default]
    Canonical,
}

impl fmt::Display for MatchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchPolicy::StrictString => "strict-string",
            MatchPolicy::Canonical => "canonical",
        })
    }
}

impl std::str::FromStr for MatchPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict-string" | "strict" => Ok(MatchPolicy::StrictString),
            "canonical" => Ok(MatchPolicy::Canonical),
            other => Err(format!("unknown match policy '{other}' (expected strict-string or canonical)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoMatchReason {
    ParseFailure(SyntaxError),
    /// Predicted formula is outside the fragment (canonical policy only).
    Defective,
    /// Gold literals are missing and nothing foreign was added.
    MissingLiterals,
    /// Predicted adds literals on top of the complete gold content.
    ExtraLiterals,
    /// Same or comparable content, but bindings or names differ.
    Mismatch,
    TooManyVariables,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    NoMatch(NoMatchReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchVerdict {
    pub verdict: Verdict,
    pub predicted_defects: Vec<Defect>,
    pub gold_defects: Vec<Defect>,
}

impl MatchVerdict {
    pub fn is_match(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

/// Literal multiset with variables erased, used to tell missing content from
/// added content.
fn erased(pc: &PrenexConjunction) -> Vec<(String, bool, Vec<Option<String>>)> {
    let mut v: Vec<_> = pc
        .literals
        .iter()
        .map(|l| {
            let args = l
                .atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(_) => None,
                    Term::Const(c) => Some(c.clone()),
                })
                .collect();
            (fold_name(&l.atom.predicate), l.negated, args)
        })
        .collect();
    v.sort();
    v
}

/// True iff sorted multiset `small` is contained in sorted multiset `big`.
fn sub_multiset<T: Ord>(small: &[T], big: &[T]) -> bool {
    let mut j = 0;
    for x in small {
        while j < big.len() && big[j] < *x {
            j += 1;
        }
        if j == big.len() || big[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

fn diagnose(pred: &PrenexConjunction, gold: &PrenexConjunction) -> NoMatchReason {
    let (p, g) = (erased(pred), erased(gold));
    if p.len() < g.len() && sub_multiset(&p, &g) {
        NoMatchReason::MissingLiterals
    } else if p.len() > g.len() && sub_multiset(&g, &p) {
        NoMatchReason::ExtraLiterals
    } else {
        NoMatchReason::Mismatch
    }
}

/// Whether already-canonicalized formulas match under `policy`, without
/// diagnosing a mismatch.
pub(crate) fn canonical_forms_match(
    predicted: &Formula,
    pc: &PrenexConjunction,
    gold: &Formula,
    gc: &PrenexConjunction,
    policy: MatchPolicy,
) -> bool {
    match policy {
        MatchPolicy::StrictString => render_fol(predicted, Style::Unicode) == render_fol(gold, Style::Unicode),
        MatchPolicy::Canonical => {
            pc.is_defect_free() && gc.is_defect_free() && alpha_equivalent(pc, gc).unwrap_or(false)
        }
    }
}

/// Compares a predicted formula against gold under `policy`.
pub fn formulas_match(predicted: &Formula, gold: &Formula, policy: MatchPolicy) -> MatchVerdict {
    let pc = canonicalize(predicted);
    let gc = canonicalize(gold);
    let verdict = if canonical_forms_match(predicted, &pc, gold, &gc, policy) {
        Verdict::Match
    } else {
        let reason = match policy {
            MatchPolicy::Canonical if !pc.is_defect_free() || !gc.is_defect_free() => NoMatchReason::Defective,
            MatchPolicy::Canonical if pc.vars.len().max(gc.vars.len()) > MAX_BIJECTION_VARS => {
                NoMatchReason::TooManyVariables
            }
            _ => diagnose(&pc, &gc),
        };
        Verdict::NoMatch(reason)
    };
    MatchVerdict { verdict, predicted_defects: pc.defects, gold_defects: gc.defects }
}

/// Text-level entry: malformed predicted text yields `NoMatch(ParseFailure)`.
pub fn match_fol_text(predicted: &str, gold: &Formula, policy: MatchPolicy) -> MatchVerdict {
    match parse_fol(predicted) {
        Ok(f) => formulas_match(&f, gold, policy),
        Err(e) => MatchVerdict {
            verdict: Verdict::NoMatch(NoMatchReason::ParseFailure(e)),
            predicted_defects: Vec::new(),
            gold_defects: canonicalize(gold).defects,
        },
    }
}
