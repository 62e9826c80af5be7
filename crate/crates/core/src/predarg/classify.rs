//! Hallucination detection and the prediction error taxonomy.

use super::structure::{EntityBinding, EntityId, ExtractFailure, PredArgStructure, Relation, MAX_ENTITIES};
use crate::fol::fold_name;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Content in a prediction that the sentence does not license. Hallucination
/// is judged against the gold vocabulary of the same instance; dropped
/// content is never hallucination.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HallucinationReport {
    /// Folded predicate names absent from the gold vocabulary.
    pub surplus_predicates: BTreeSet<String>,
    /// How many more entities the prediction has than gold.
    pub surplus_entities: usize,
    /// Names glue repair could not segment and gold does not use.
    pub unsplittable: BTreeSet<String>,
}

impl HallucinationReport {
    pub fn is_case(&self) -> bool {
        !self.surplus_predicates.is_empty() || self.surplus_entities > 0 || !self.unsplittable.is_empty()
    }
}

pub fn detect_hallucination(predicted: &PredArgStructure, gold: &PredArgStructure) -> HallucinationReport {
    let gold_vocab = gold.vocabulary();
    HallucinationReport {
        surplus_predicates: predicted.vocabulary().difference(&gold_vocab).cloned().collect(),
        surplus_entities: predicted.entities.len().saturating_sub(gold.entities.len()),
        unsplittable: predicted.unsplittable.iter().filter(|n| !gold_vocab.contains(&fold_name(n))).cloned().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorFlag {
    Glued,
    DroppedPredicate,
    WrongRelation,
    QuantifierStructure,
    BindingSwap,
    Misattributed,
    Hallucination,
}

impl ErrorFlag {
    pub const ALL: [ErrorFlag; 7] = [
        ErrorFlag::Glued,
        ErrorFlag::DroppedPredicate,
        ErrorFlag::WrongRelation,
        ErrorFlag::QuantifierStructure,
        ErrorFlag::BindingSwap,
        ErrorFlag::Misattributed,
        ErrorFlag::Hallucination,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorFlag::Glued => "glued",
            ErrorFlag::DroppedPredicate => "dropped-predicate",
            ErrorFlag::WrongRelation => "wrong-relation",
            ErrorFlag::QuantifierStructure => "quantifier-structure",
            ErrorFlag::BindingSwap => "binding-swap",
            ErrorFlag::Misattributed => "misattributed",
            ErrorFlag::Hallucination => "hallucination",
        }
    }
}

/// Per-prediction error flags. `glued` is informational: a glued prediction
/// that repairs cleanly is still structurally correct, so it does not count
/// towards [`ErrorTaxonomy::has_errors`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ErrorTaxonomy {
    pub glued: bool,
    pub dropped_predicate: bool,
    pub wrong_relation: bool,
    pub quantifier_structure: bool,
    pub binding_swap: bool,
    /// A gold-vocabulary predicate on the wrong entity, or a predicate
    /// asserted together with its own negation.
    pub misattributed: bool,
    pub hallucination: bool,
    /// Gold predicate instances without a counterpart.
    pub dropped_count: usize,
    /// Predicted instances of gold predicates with no gold counterpart.
    pub misattributed_count: usize,
    /// Relation instances in either structure without a partner.
    pub relation_mismatches: usize,
    pub report: HallucinationReport,
}

impl ErrorTaxonomy {
    pub fn flag(&self, f: ErrorFlag) -> bool {
        match f {
            ErrorFlag::Glued => self.glued,
            ErrorFlag::DroppedPredicate => self.dropped_predicate,
            ErrorFlag::WrongRelation => self.wrong_relation,
            ErrorFlag::QuantifierStructure => self.quantifier_structure,
            ErrorFlag::BindingSwap => self.binding_swap,
            ErrorFlag::Misattributed => self.misattributed,
            ErrorFlag::Hallucination => self.hallucination,
        }
    }

    pub fn flags(&self) -> impl Iterator<Item = ErrorFlag> + '_ {
        ErrorFlag::ALL.into_iter().filter(|&f| self.flag(f))
    }

    /// Any flag other than `glued`.
    pub fn has_errors(&self) -> bool {
        self.flags().any(|f| f != ErrorFlag::Glued)
    }
}

/// gold entity index -> predicted entity index
type Mapping = Vec<Option<usize>>;

fn shared_unary(g: &EntityBinding, p: &EntityBinding) -> usize {
    g.positive.intersection(&p.positive).count() + g.negative.intersection(&p.negative).count()
}

fn remapped(gold: &PredArgStructure, map: &[Option<usize>]) -> Vec<Option<Relation>> {
    let f = |e: EntityId| map.get(e.0).copied().flatten().map(EntityId);
    gold.relations.iter().map(|r| r.remap(&f)).collect()
}

/// Relations of `pred` and of `gold` (moved through `map`) without a partner
/// on the other side. Gold relations touching an unmapped entity never match.
fn relation_diff(
    gold: &PredArgStructure,
    pred: &PredArgStructure,
    map: &[Option<usize>],
) -> (Vec<Relation>, Vec<Relation>) {
    let moved = remapped(gold, map);
    let moved_set: BTreeSet<&Relation> = moved.iter().flatten().collect();
    let missing: Vec<Relation> = gold
        .relations
        .iter()
        .zip(&moved)
        .filter_map(|(orig, m)| match m {
            Some(m) if pred.relations.contains(m) => None,
            Some(m) => Some(m.clone()),
            None => Some(orig.clone()),
        })
        .collect();
    let extra = pred.relations.iter().filter(|r| !moved_set.contains(r)).cloned().collect();
    (missing, extra)
}

/// Injective partial maps gold -> pred that leave exactly
/// `gold.len() - min(gold.len(), pred.len())` gold entities unmapped, best
/// first by (shared unary predicates desc, relation mismatches asc); the
/// enumeration order (ascending ids, `None` last) breaks remaining ties.
fn best_mapping(gold: &PredArgStructure, pred: &PredArgStructure) -> Mapping {
    let n = gold.entities.len();
    let m = pred.entities.len();
    if n > MAX_ENTITIES || m > MAX_ENTITIES {
        // beyond the cap: align by id order
        return (0..n).map(|i| (i < m).then_some(i)).collect();
    }
    let shared: Vec<Vec<usize>> =
        gold.entities.iter().map(|g| pred.entities.iter().map(|p| shared_unary(g, p)).collect()).collect();
    let mut best: Option<(usize, usize, Mapping)> = None;
    let mut cur: Mapping = Vec::with_capacity(n);
    let mut used = vec![false; m];
    let nones = n.saturating_sub(m);
    enumerate(0, nones, &shared, &mut cur, &mut used, &mut |map| {
        let score: usize = map.iter().enumerate().filter_map(|(i, j)| j.map(|j| shared[i][j])).sum();
        if best.as_ref().is_some_and(|(s, _, _)| score < *s) {
            return;
        }
        let (missing, extra) = relation_diff(gold, pred, map);
        let mismatch = missing.len() + extra.len();
        let better = match &best {
            None => true,
            Some((s, r, _)) => score > *s || mismatch < *r,
        };
        if better {
            best = Some((score, mismatch, map.to_vec()));
        }
    });
    best.map(|(_, _, m)| m).unwrap_or_default()
}

fn enumerate(
    i: usize,
    nones_left: usize,
    shared: &[Vec<usize>],
    cur: &mut Mapping,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[Option<usize>]),
) {
    if i == shared.len() {
        visit(cur);
        return;
    }
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            cur.push(Some(j));
            enumerate(i + 1, nones_left, shared, cur, used, visit);
            cur.pop();
            used[j] = false;
        }
    }
    if nones_left > 0 {
        cur.push(None);
        enumerate(i + 1, nones_left - 1, shared, cur, used, visit);
        cur.pop();
    }
}

fn flipped(r: &Relation) -> Relation {
    let mut f = r.clone();
    f.args.reverse();
    f
}

/// Classifies one prediction against gold. An [`ExtractFailure::Defective`]
/// prediction is a quantifier-structure error; a contradiction is a
/// misattribution. Zero error flags (ignoring `glued`) holds exactly when
/// the prediction is [`structures_equal`](super::structures_equal) to gold.
pub fn classify_errors(
    predicted: Result<&PredArgStructure, &ExtractFailure>,
    gold: &PredArgStructure,
) -> ErrorTaxonomy {
    let pred = match predicted {
        Ok(p) => p,
        Err(ExtractFailure::Defective(_)) => {
            return ErrorTaxonomy { quantifier_structure: true, ..Default::default() };
        }
        Err(ExtractFailure::Contradiction { .. }) => {
            return ErrorTaxonomy { misattributed: true, misattributed_count: 1, ..Default::default() };
        }
    };
    let mut t = ErrorTaxonomy { glued: pred.repaired, ..Default::default() };
    t.report = detect_hallucination(pred, gold);
    t.hallucination = t.report.is_case();

    let map = best_mapping(gold, pred);
    let gold_vocab = gold.vocabulary();
    let mut covered: Vec<(BTreeSet<&String>, BTreeSet<&String>)> = vec![Default::default(); pred.entities.len()];
    for (g, j) in gold.entities.iter().zip(&map) {
        match j {
            None => t.dropped_count += g.positive.len() + g.negative.len(),
            Some(j) => {
                let p = &pred.entities[*j];
                t.dropped_count += g.positive.difference(&p.positive).count();
                t.dropped_count += g.negative.difference(&p.negative).count();
                covered[*j] = (g.positive.iter().collect(), g.negative.iter().collect());
            }
        }
    }
    for (p, (pos, neg)) in pred.entities.iter().zip(&covered) {
        let stray =
            p.positive.iter().filter(|x| !pos.contains(x)).chain(p.negative.iter().filter(|x| !neg.contains(x)));
        // names outside gold vocabulary are hallucinations, not misattributions
        t.misattributed_count += stray.filter(|x| gold_vocab.contains(*x)).count();
    }

    let (missing, extra) = relation_diff(gold, pred, &map);
    t.relation_mismatches = missing.len() + extra.len();
    let pred_rel_names: BTreeSet<&String> = pred.relations.iter().map(|r| &r.predicate).collect();
    t.dropped_count += missing.iter().filter(|r| !pred_rel_names.contains(&r.predicate)).count();
    if t.relation_mismatches > 0 {
        let flips: BTreeSet<Relation> = missing.iter().map(flipped).collect();
        let swap_repairs = missing.len() == extra.len() && extra.iter().all(|r| flips.contains(r));
        if swap_repairs {
            t.binding_swap = true;
        } else {
            t.wrong_relation = true;
        }
    }
    t.dropped_predicate = t.dropped_count > 0;
    t.misattributed = t.misattributed_count > 0;
    t
}
