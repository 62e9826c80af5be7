use super::metrics::Tally;
use super::ScoreError;
use crate::datagen::{DatasetId, Instance};
use crate::fol::{canonical_forms_match, canonicalize, parse_fol, Formula, MatchPolicy, PrenexConjunction};
use crate::predarg::{
    classify_errors, extract_structure, structures_equal, ErrorFlag, Lexicon, PredArgStructure, Repair,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// One line of a FOL prediction file. `fol` is the model's raw text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolPrediction {
    pub instance_id: String,
    pub fol: String,
}

/// Histogram keys beyond the [`ErrorFlag`] names.
pub const MISSING: &str = "missing";
pub const UNPARSEABLE: &str = "unparseable";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolMetrics {
    /// Formula match under `policy`.
    pub accuracy: Tally,
    /// Structure equality after repair.
    pub predarg: Tally,
    /// Hallucination cases over all instances.
    pub hallucination: Tally,
    pub missing: u64,
    pub unparseable: u64,
    /// Error flag (or `missing`/`unparseable`) -> number of predictions.
    pub taxonomy: BTreeMap<String, u64>,
}

impl FolMetrics {
    pub fn answered(&self) -> u64 {
        self.accuracy.total - self.missing
    }
}

struct Gold {
    formula: Formula,
    canonical: PrenexConjunction,
    structure: PredArgStructure,
}

fn gold_of(inst: &Instance, lex: &Lexicon) -> Result<Gold, ScoreError> {
    let bad = |message: String| ScoreError::BadGold { instance_id: inst.instance_id.clone(), message };
    let formula = parse_fol(&inst.gold_fol).map_err(|e| bad(e.to_string()))?;
    let canonical = canonicalize(&formula);
    let structure = extract_structure(&canonical, lex, Repair::Off).map_err(|e| bad(e.to_string()))?;
    Ok(Gold { formula, canonical, structure })
}

/// FOL accuracy, structure accuracy, hallucination cases and the error
/// histogram. Missing predictions are wrong on both accuracies and are not
/// hallucination cases; so are unparseable ones.
pub fn score_fol(
    ds: &[Instance],
    preds: &[FolPrediction],
    policy: MatchPolicy,
    lex: &Lexicon,
) -> Result<BTreeMap<DatasetId, FolMetrics>, ScoreError> {
    let known: HashSet<&str> = ds.iter().map(|i| i.instance_id.as_str()).collect();
    let mut map: HashMap<&str, &str> = HashMap::with_capacity(preds.len());
    for p in preds {
        if !known.contains(p.instance_id.as_str()) {
            return Err(ScoreError::UnknownInstanceId(p.instance_id.clone()));
        }
        if map.insert(p.instance_id.as_str(), p.fol.as_str()).is_some() {
            return Err(ScoreError::DuplicatePrediction(p.instance_id.clone()));
        }
    }

    let mut out: BTreeMap<DatasetId, FolMetrics> = BTreeMap::new();
    for inst in ds {
        let gold = gold_of(inst, lex)?;
        let m = out.entry(inst.dataset).or_default();
        let Some(text) = map.get(inst.instance_id.as_str()) else {
            m.accuracy.record(false);
            m.predarg.record(false);
            m.hallucination.record(false);
            m.missing += 1;
            *m.taxonomy.entry(MISSING.into()).or_default() += 1;
            continue;
        };
        // identical text parses and canonicalizes identically
        let parsed;
        let (pred_f, pc) = if *text == inst.gold_fol {
            (&gold.formula, &gold.canonical)
        } else {
            let Ok(f) = parse_fol(text) else {
                m.accuracy.record(false);
                m.predarg.record(false);
                m.hallucination.record(false);
                m.unparseable += 1;
                *m.taxonomy.entry(UNPARSEABLE.into()).or_default() += 1;
                continue;
            };
            let pc = canonicalize(&f);
            parsed = (f, pc);
            (&parsed.0, &parsed.1)
        };
        m.accuracy.record(canonical_forms_match(pred_f, pc, &gold.formula, &gold.canonical, policy));
        let extracted = extract_structure(pc, lex, Repair::On);
        let equal = extracted.as_ref().is_ok_and(|s| structures_equal(s, &gold.structure).unwrap_or(false));
        m.predarg.record(equal);
        if equal {
            // equal structures carry no error flag; only the repair shows
            m.hallucination.record(false);
            if extracted.as_ref().is_ok_and(|s| s.repaired) {
                *m.taxonomy.entry(ErrorFlag::Glued.as_str().into()).or_default() += 1;
            }
            continue;
        }
        let taxonomy = classify_errors(extracted.as_ref(), &gold.structure);
        m.hallucination.record(taxonomy.hallucination);
        for flag in taxonomy.flags() {
            *m.taxonomy.entry(flag.as_str().into()).or_default() += 1;
        }
    }
    Ok(out)
}

/// Histogram keys in report order.
pub fn taxonomy_keys() -> impl Iterator<Item = &'static str> {
    ErrorFlag::ALL.into_iter().map(ErrorFlag::as_str).chain([UNPARSEABLE, MISSING])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate_dataset, Count, GenSpec, Vocabulary};

    fn data(d: DatasetId, n: usize) -> (Vec<Instance>, Lexicon) {
        let v = Vocabulary::default_vocab();
        (generate_dataset(&GenSpec::new(d, 4, Count::N(n)), &v).unwrap(), v.lexicon)
    }

    fn cap(w: &str) -> String {
        w[..1].to_uppercase() + &w[1..]
    }

    fn gold_preds(ds: &[Instance]) -> Vec<FolPrediction> {
        ds.iter().map(|i| FolPrediction { instance_id: i.instance_id.clone(), fol: i.gold_fol.clone() }).collect()
    }

    #[test]
    fn gold_predictions_score_full() {
        let (ds, lex) = data(DatasetId::D22, 20);
        let m = &score_fol(&ds, &gold_preds(&ds), MatchPolicy::Canonical, &lex).unwrap()[&DatasetId::D22];
        assert_eq!(m.accuracy, Tally::new(20, 20));
        assert_eq!(m.predarg, Tally::new(20, 20));
        assert_eq!(m.hallucination, Tally::new(0, 20));
        assert!(m.taxonomy.is_empty());
    }

    #[test]
    fn glued_predictions_lose_fol_but_keep_structure() {
        let (ds, lex) = data(DatasetId::D33, 10);
        let preds: Vec<FolPrediction> = ds
            .iter()
            .map(|i| {
                // Glass(x) ∧ Red(x) ∧ Clean(x) -> Glass(x) ∧ RedClean(x)
                let mut fol = i.gold_fol.clone();
                for (ps, v) in i.props.iter().zip(["x", "y"]) {
                    // props are in modifier order, the formula puts the color first
                    let mut words: Vec<String> = ps.iter().map(|p| cap(&p.word)).collect();
                    words.rotate_right(1);
                    let pieces: Vec<String> = words.iter().map(|w| format!("{w}({v})")).collect();
                    fol = fol.replace(&pieces.join(" ∧ "), &format!("{}({v})", words.concat()));
                }
                FolPrediction { instance_id: i.instance_id.clone(), fol }
            })
            .collect();
        let m = &score_fol(&ds, &preds, MatchPolicy::Canonical, &lex).unwrap()[&DatasetId::D33];
        assert_eq!(m.accuracy, Tally::new(0, 10));
        assert_eq!(m.predarg, Tally::new(10, 10));
        assert_eq!(m.hallucination.hits, 0);
    }

    #[test]
    fn missing_and_garbage() {
        let (ds, lex) = data(DatasetId::D11, 4);
        let mut preds = gold_preds(&ds);
        preds.remove(0);
        preds[0].fol = "I think it was red".into();
        let m = &score_fol(&ds, &preds, MatchPolicy::Canonical, &lex).unwrap()[&DatasetId::D11];
        assert_eq!(m.accuracy, Tally::new(2, 4));
        assert_eq!(m.predarg, Tally::new(2, 4));
        assert_eq!(m.hallucination, Tally::new(0, 4));
        assert_eq!((m.missing, m.unparseable), (1, 1));
        assert_eq!(m.taxonomy.get(MISSING), Some(&1));
        let dup = [preds[0].clone(), preds[0].clone()];
        assert!(matches!(score_fol(&ds, &dup, MatchPolicy::Canonical, &lex), Err(ScoreError::DuplicatePrediction(_))));
    }

    #[test]
    fn strict_policy_never_beats_canonical() {
        let (ds, lex) = data(DatasetId::D11, 8);
        let preds: Vec<FolPrediction> = ds
            .iter()
            .map(|i| FolPrediction {
                instance_id: i.instance_id.clone(),
                fol: i.gold_fol.replace("∃x", "∃u").replace("(x", "(u").replace("x)", "u)"),
            })
            .collect();
        let c = &score_fol(&ds, &preds, MatchPolicy::Canonical, &lex).unwrap()[&DatasetId::D11];
        let s = &score_fol(&ds, &preds, MatchPolicy::StrictString, &lex).unwrap()[&DatasetId::D11];
        assert_eq!(c.accuracy.hits, 8);
        assert_eq!(s.accuracy.hits, 0);
    }
}
