use argbind::fol::{
    alpha_equivalent, canonicalize, fold_name, parse_fol, render_fol, Formula, Literal, PrenexConjunction, Style, Term,
};
use proptest::prelude::*;
use proptest::sample::select;

const VARS: [&str; 5] = ["x", "y", "z", "u", "w1"];
const CONSTS: [&str; 4] = ["Car", "House", "bob", "alice"];
const PREDICATES: [&str; 6] = ["Red", "car", "Infrontof", "standing-in-front-of", "Big_Red", "P2"];

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => select(&VARS[..]).prop_map(Term::var),
        1 => select(&CONSTS[..]).prop_map(Term::constant),
    ]
}

fn atom() -> impl Strategy<Value = Formula> {
    (select(&PREDICATES[..]), prop::collection::vec(term(), 1..=3)).prop_map(|(p, args)| Formula::atom(p, args))
}

/// Any tree the parser's grammar can express, including forms outside the
/// prenex-conjunctive fragment.
fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            (select(&VARS[..]), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            prop::collection::vec(inner.clone(), 2..=4).prop_map(Formula::And),
            inner.prop_map(Formula::not),
        ]
    })
}

/// A defect-free prenex conjunction over at most three variables.
fn conjunction() -> impl Strategy<Value = Formula> {
    (1usize..=3)
        .prop_flat_map(|k| {
            let vars = &VARS[..k];
            let lit = (select(&["P", "Q", "R", "S", "T"][..]), prop::bool::ANY, prop::bool::weighted(0.2));
            let arg = prop_oneof![9 => select(vars).prop_map(Term::var), 1 => Just(Term::constant("Car"))];
            let body = prop::collection::vec((lit, prop::collection::vec(arg, 2)), 1..=5);
            (Just(vars.to_vec()), body)
        })
        .prop_map(|(vars, body)| {
            let mut conjuncts: Vec<Formula> = body
                .into_iter()
                .map(|((p, binary, negated), mut args)| {
                    args.truncate(if binary { 2 } else { 1 });
                    let a = Formula::atom(p, args);
                    if negated {
                        Formula::not(a)
                    } else {
                        a
                    }
                })
                .collect();
            // every quantified variable occurs somewhere
            for v in &vars {
                if !conjuncts.iter().any(|f| f.atoms().iter().any(|a| a.args.contains(&Term::var(*v)))) {
                    conjuncts.push(Formula::atom("P", vec![Term::var(*v)]));
                }
            }
            Formula::exists_all(&vars, Formula::and(conjuncts))
        })
}

fn as_formula(literals: Vec<Literal>, vars: &[String]) -> Formula {
    Formula::exists_all(vars, Formula::and(literals.into_iter().map(Formula::literal).collect()))
}

/// A consistent renaming under `perm`, with literals rotated by `rot`.
fn renamed(pc: &PrenexConjunction, perm: &[usize], rot: usize) -> Formula {
    let fresh = ["a1", "b1", "c1"];
    let name = |v: &str| pc.vars.iter().position(|x| x == v).map_or(v.to_string(), |i| fresh[perm[i]].to_string());
    let mut lits: Vec<Literal> = pc
        .literals
        .iter()
        .map(|l| {
            let mut l = l.clone();
            for t in &mut l.atom.args {
                if let Term::Var(v) = t {
                    *v = name(v);
                }
            }
            l
        })
        .collect();
    let n = lits.len();
    lits.rotate_left(rot % n);
    let mut vars: Vec<String> = pc.vars.iter().map(|v| name(v)).collect();
    vars.reverse();
    as_formula(lits, &vars)
}

/// One small edit that may or may not preserve equivalence.
fn perturbed(pc: &PrenexConjunction, at: usize, edit: u8) -> Formula {
    let mut lits = pc.literals.clone();
    let n = lits.len();
    let l = &mut lits[at % n];
    match edit % 4 {
        0 => l.negated = !l.negated,
        1 => l.atom.args.reverse(),
        2 => l.atom.predicate = if l.atom.predicate == "P" { "Q".into() } else { "P".into() },
        _ => {
            let v = pc.vars[at % pc.vars.len()].clone();
            l.atom.args[0] = Term::Var(v);
        }
    }
    as_formula(lits, &pc.vars)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Independent oracle: try every bijection and compare sorted literal keys.
fn brute_force(a: &PrenexConjunction, b: &PrenexConjunction) -> bool {
    if a.vars.len() != b.vars.len() {
        return false;
    }
    let key = |l: &Literal, map: &dyn Fn(&str) -> String| {
        let args: Vec<String> = l
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => format!("?{}", map(v)),
                Term::Const(c) => format!("'{c}"),
            })
            .collect();
        (l.negated, fold_name(&l.atom.predicate), args)
    };
    let mut target: Vec<_> = b.literals.iter().map(|l| key(l, &|v| v.to_string())).collect();
    target.sort();
    permutations(a.vars.len()).into_iter().any(|perm| {
        let map = |v: &str| a.vars.iter().position(|x| x == v).map_or(format!("free:{v}"), |i| b.vars[perm[i]].clone());
        let mut mine: Vec<_> = a.literals.iter().map(|l| key(l, &map)).collect();
        mine.sort();
        mine == target
    })
}

fn pair() -> impl Strategy<Value = (Formula, Formula)> {
    conjunction().prop_flat_map(|a| {
        let pc = canonicalize(&a);
        let k = pc.vars.len();
        let perm = select(permutations(k));
        prop_oneof![
            (Just(a.clone()), perm.clone(), any::<usize>()).prop_map(move |(a, p, r)| {
                let b = renamed(&canonicalize(&a), &p, r);
                (a, b)
            }),
            (Just(a.clone()), perm, any::<usize>(), any::<usize>(), any::<u8>()).prop_map(|(a, p, r, at, e)| {
                let b = perturbed(&canonicalize(&renamed(&canonicalize(&a), &p, r)), at, e);
                (a, b)
            }),
            (Just(a), conjunction()),
        ]
    })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        for style in [Style::Unicode, Style::Ascii] {
            let text = render_fol(&f, style);
            let parsed = parse_fol(&text);
            prop_assert_eq!(parsed.as_ref(), Ok(&f), "{}", text);
        }
    }

    #[test]
    fn canonical_form_is_stable(f in formula()) {
        let pc = canonicalize(&f);
        prop_assert_eq!(&pc, &canonicalize(&f));
        let reparsed = parse_fol(&render_fol(&f, Style::Ascii)).unwrap();
        prop_assert_eq!(pc.render(Style::Unicode), canonicalize(&reparsed).render(Style::Unicode));
    }

    #[test]
    fn canonical_rendering_is_equivalent_to_its_source(f in conjunction()) {
        let pc = canonicalize(&f);
        let again = canonicalize(&parse_fol(&pc.render(Style::Unicode)).unwrap());
        prop_assert_eq!(alpha_equivalent(&pc, &again), Ok(true));
    }

    #[test]
    fn equivalence_is_reflexive_and_symmetric((a, b) in pair()) {
        let (ca, cb) = (canonicalize(&a), canonicalize(&b));
        prop_assert_eq!(alpha_equivalent(&ca, &ca), Ok(true));
        prop_assert_eq!(alpha_equivalent(&ca, &cb), alpha_equivalent(&cb, &ca));
    }

    #[test]
    fn equivalence_is_transitive(a in conjunction(), p in select(permutations(3)), q in select(permutations(3)), r in any::<usize>()) {
        let ca = canonicalize(&a);
        let k = ca.vars.len();
        let restrict = |p: &[usize]| -> Vec<usize> { p.iter().copied().filter(|&i| i < k).collect() };
        let cb = canonicalize(&renamed(&ca, &restrict(&p), r));
        let cc = canonicalize(&renamed(&cb, &restrict(&q), r / 2));
        prop_assert_eq!(alpha_equivalent(&ca, &cb), Ok(true));
        prop_assert_eq!(alpha_equivalent(&cb, &cc), Ok(true));
        prop_assert_eq!(alpha_equivalent(&ca, &cc), Ok(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn agrees_with_brute_force_bijections((a, b) in pair()) {
        let (ca, cb) = (canonicalize(&a), canonicalize(&b));
        prop_assert!(ca.is_defect_free() && cb.is_defect_free());
        prop_assert_eq!(
            alpha_equivalent(&ca, &cb),
            Ok(brute_force(&ca, &cb)),
            "{} vs {}", render_fol(&a, Style::Ascii), render_fol(&b, Style::Ascii)
        );
    }
}
