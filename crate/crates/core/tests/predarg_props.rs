use argbind::datagen::{generate_dataset, Count, DatasetId, GenSpec, Instance, Vocabulary};
use argbind::fol::{canonicalize, fold_name, parse_fol, render_fol, Atom, Literal, PrenexConjunction, Style, Term};
use argbind::predarg::{
    classify_errors, detect_hallucination, extract_structure, split_glued, structures_equal, PredArgStructure, Repair,
};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::LazyLock;

static VOCAB: LazyLock<Vocabulary> = LazyLock::new(Vocabulary::default_vocab);

/// Every D11 instance plus samples of the multi-property families.
static POOL: LazyLock<Vec<Instance>> = LazyLock::new(|| {
    let mut pool = Vec::new();
    for (d, count) in [
        (DatasetId::D11, Count::All),
        (DatasetId::D22, Count::N(200)),
        (DatasetId::D33, Count::N(200)),
        (DatasetId::Dand, Count::N(100)),
    ] {
        pool.extend(generate_dataset(&GenSpec::new(d, 3, count), &VOCAB).unwrap());
    }
    pool
});

fn instance() -> impl Strategy<Value = &'static Instance> {
    (0..POOL.len()).prop_map(|i| &POOL[i])
}

fn gold(inst: &Instance) -> (PrenexConjunction, PredArgStructure) {
    let pc = canonicalize(&parse_fol(&inst.gold_fol).unwrap());
    (pc, inst.rebuild().unwrap().structure)
}

fn extract(pc: &PrenexConjunction) -> Result<PredArgStructure, argbind::predarg::ExtractFailure> {
    let text = pc.render(Style::Unicode);
    extract_structure(&canonicalize(&parse_fol(&text).unwrap()), &VOCAB.lexicon, Repair::On)
}

fn capitalized(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Fuses the positive unary literals picked by `mask` (at least two) of the
/// variable picked by `which` into one camel-case atom at `pos`.
fn fuse(pc: &PrenexConjunction, which: usize, mask: u32, pos: usize) -> Option<PrenexConjunction> {
    let mut by_var: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in pc.literals.iter().enumerate() {
        if let (false, [Term::Var(v)]) = (l.negated, l.atom.args.as_slice()) {
            by_var.entry(v).or_default().push(i);
        }
    }
    let groups: Vec<&Vec<usize>> = by_var.values().filter(|g| g.len() >= 2).collect();
    let group = groups.get(which % groups.len().max(1))?;
    let chosen: Vec<usize> = group.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &i)| i).collect();
    if chosen.len() < 2 {
        return None;
    }
    let fused: String = chosen.iter().map(|&i| capitalized(&pc.literals[i].atom.predicate)).collect();
    let args = pc.literals[chosen[0]].atom.args.clone();
    let mut literals: Vec<Literal> =
        pc.literals.iter().enumerate().filter(|(i, _)| !chosen.contains(i)).map(|(_, l)| l.clone()).collect();
    literals.insert(pos % (literals.len() + 1), Literal::positive(Atom::new(fused, args)));
    Some(PrenexConjunction { vars: pc.vars.clone(), literals, defects: Vec::new() })
}

/// One edit of the gold conjunction: drop, negate, swap relation arguments,
/// move a literal to another variable, or replace a predicate.
fn edited(pc: &PrenexConjunction, at: usize, edit: u8, word: usize) -> PrenexConjunction {
    let mut out = pc.clone();
    let n = out.literals.len();
    let i = at % n;
    match edit % 5 {
        0 => {
            out.literals.remove(i);
        }
        1 => out.literals[i].negated = !out.literals[i].negated,
        2 => out.literals[i].atom.args.reverse(),
        3 => {
            let v = out.vars[word % out.vars.len()].clone();
            out.literals[i].atom.args[0] = Term::Var(v);
        }
        _ => {
            let words: Vec<&String> = VOCAB.lexicon.unary_words().collect();
            out.literals[i].atom.predicate = capitalized(words[word % words.len()]);
        }
    }
    out
}

proptest! {
    #[test]
    fn gold_round_trips_to_template_structure(inst in instance()) {
        let (pc, want) = gold(inst);
        let f = parse_fol(&render_fol(&parse_fol(&inst.gold_fol).unwrap(), Style::Ascii)).unwrap();
        prop_assert_eq!(canonicalize(&f), pc.clone());
        let got = extract_structure(&pc, &VOCAB.lexicon, Repair::Off).unwrap();
        prop_assert!(structures_equal(&got, &want).unwrap());
    }

    #[test]
    fn fused_predicates_are_repaired(inst in instance(), which in any::<usize>(), mask in any::<u32>(), pos in any::<usize>()) {
        let (pc, want) = gold(inst);
        let Some(mutated) = fuse(&pc, which, mask, pos) else { return Ok(()) };
        let got = extract(&mutated).unwrap();
        prop_assert!(got.repaired);
        prop_assert!(structures_equal(&got, &want).unwrap(), "{}", mutated.render(Style::Unicode));
    }

    #[test]
    fn gold_against_itself_is_not_hallucination(inst in instance()) {
        let (_, s) = gold(inst);
        prop_assert!(!detect_hallucination(&s, &s).is_case());
        prop_assert!(!classify_errors(Ok(&s), &s).has_errors());
    }

    #[test]
    fn zero_flags_exactly_on_equal_structures(inst in instance(), at in any::<usize>(), edit in any::<u8>(), word in any::<usize>()) {
        let (pc, want) = gold(inst);
        let mutated = edited(&pc, at, edit, word);
        let got = extract(&mutated);
        let equal = got.as_ref().is_ok_and(|s| structures_equal(s, &want).unwrap_or(false));
        let taxonomy = classify_errors(got.as_ref(), &want);
        prop_assert_eq!(taxonomy.has_errors(), !equal, "{} -> {:?}", mutated.render(Style::Unicode), taxonomy);
    }

    #[test]
    fn split_covers_the_input(name in "[A-Za-z][A-Za-z0-9_-]{0,24}") {
        if let Ok(parts) = split_glued(&name, &VOCAB.lexicon) {
            prop_assert_eq!(fold_name(&parts.concat()), fold_name(&name));
        }
    }

    #[test]
    fn split_recovers_glued_lexicon_words(picks in prop::collection::vec(any::<usize>(), 1..=4), upper in any::<bool>()) {
        let words: Vec<&String> = VOCAB.lexicon.unary_words().collect();
        let parts: Vec<String> = picks.iter().map(|&k| words[k % words.len()].clone()).collect();
        let glued: String = parts.iter().map(|w| if upper { capitalized(w) } else { w.clone() }).collect();
        match split_glued(&glued, &VOCAB.lexicon) {
            Ok(got) => {
                prop_assert_eq!(fold_name(&got.concat()), fold_name(&glued));
                prop_assert!(got.len() <= parts.len());
            }
            // only lower-case glue may hide the word boundaries
            Err(e) => prop_assert!(!upper, "{}", e),
        }
    }
}
