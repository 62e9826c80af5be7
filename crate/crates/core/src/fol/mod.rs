//! The existential-conjunctive FOL fragment used for gold and predicted
//! translations.
//!
//! Formulas are built from existential quantifiers, conjunction, negation and
//! atoms over variables and constants. [`parse_fol`] accepts both the Unicode
//! notation (`∃x ∃y (Red(x) ∧ Car(x))`) and an ASCII spelling
//! (`exists x. exists y. (Red(x) & Car(x))`); [`render_fol`] prints either.
//! [`canonicalize`] reduces a formula to a [`PrenexConjunction`], the unit of
//! exact-match comparison.

mod canon;
mod parse;
mod render;

pub(crate) use canon::canonical_forms_match;
pub use canon::{
    alpha_equivalent, canonicalize, formulas_match, match_fol_text, Defect, EquivError, MatchPolicy, MatchVerdict,
    NoMatchReason, PrenexConjunction, Verdict, MAX_BIJECTION_VARS,
};
pub use parse::{parse_fol, SyntaxError, MAX_NESTING};
pub use render::{render_fol, Style};

use std::fmt;

/// An argument position: a (possibly free) variable or a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    /// Capitalized constants such as the `Car` in `BigRedShiny(Car)` are
    /// candidates for noun-as-argument repair.
    pub fn is_noun_like(&self) -> bool {
        matches!(self, Term::Const(n) if n.chars().next().is_some_and(char::is_uppercase))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    /// Shorthand for an atom whose arguments are all variables.
    pub fn over_vars(predicate: impl Into<String>, vars: &[&str]) -> Self {
        Atom::new(predicate, vars.iter().map(|v| Term::var(*v)).collect())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
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

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal { atom, negated: false }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal { atom, negated: true }
    }

    /// Sort key for the canonical literal order: folded predicate name, arity,
    /// argument tuple, polarity, then the raw spelling as a final tiebreak.
    fn canonical_key(&self) -> (String, usize, &[Term], bool, &str) {
        (fold_name(&self.atom.predicate), self.atom.arity(), &self.atom.args, self.negated, &self.atom.predicate)
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

/// Formula tree. Conjunction is n-ary; `A ∧ B ∧ C` parses to one `And` node
/// with three children while `A ∧ (B ∧ C)` keeps the nested node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Exists { var: String, body: Box<Formula> },
    And(Vec<Formula>),
    Not(Box<Formula>),
    Atom(Atom),
}

impl Formula {
    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists { var: var.into(), body: Box::new(body) }
    }

    /// Wraps `body` in one quantifier per variable, outermost first.
    pub fn exists_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.as_ref(), acc))
    }

    /// Builds a conjunction; a single conjunct is returned unwrapped.
    pub fn and(mut conjuncts: Vec<Formula>) -> Self {
        if conjuncts.len() == 1 {
            conjuncts.pop().unwrap()
        } else {
            Formula::And(conjuncts)
        }
    }

    #[allow(clippy::should_implement_trait)] // a constructor, like `exists` and `and`
    pub fn not(body: Formula) -> Self {
        Formula::Not(Box::new(body))
    }

    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(Atom::new(predicate, args))
    }

    pub fn literal(lit: Literal) -> Self {
        if lit.negated {
            Formula::not(Formula::Atom(lit.atom))
        } else {
            Formula::Atom(lit.atom)
        }
    }

    /// All atoms in left-to-right order.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::Exists { body, .. } | Formula::Not(body) => stack.push(body),
                Formula::And(cs) => stack.extend(cs.iter().rev()),
            }
        }
        out
    }

    /// Number of leading quantifiers.
    pub fn quantifier_prefix_len(&self) -> usize {
        let mut n = 0;
        let mut f = self;
        while let Formula::Exists { body, .. } = f {
            n += 1;
            f = body;
        }
        n
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_fol(self, Style::Unicode))
    }
}

/// Normalization fold for predicate names: lower-case, with hyphens and
/// underscores removed, so `Infrontof`, `in-front-of` and `in_front_of`
/// coincide.
pub fn fold_name(name: &str) -> String {
    name.chars().filter(|c| *c != '-' && *c != '_').flat_map(char::to_lowercase).collect()
}

/// Canonical variable names in order: x, y, z, x1, x2, ...
pub fn canonical_var_name(index: usize) -> String {
    match index {
        0 => "x".to_string(),
        1 => "y".to_string(),
        2 => "z".to_string(),
        n => format!("x{}", n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_strips_case_and_separators() {
        assert_eq!(fold_name("Infrontof"), "infrontof");
        assert_eq!(fold_name("in-front-of"), "infrontof");
        assert_eq!(fold_name("In_Front_Of"), "infrontof");
    }

    #[test]
    fn canonical_names() {
        let names: Vec<_> = (0..6).map(canonical_var_name).collect();
        assert_eq!(names, ["x", "y", "z", "x1", "x2", "x3"]);
    }

    #[test]
    fn literal_order_is_case_folded() {
        let a = Literal::positive(Atom::over_vars("car", &["x"]));
        let b = Literal::positive(Atom::over_vars("Blue", &["y"]));
        assert!(b < a);
    }

    #[test]
    fn noun_like_constants() {
        assert!(Term::constant("Car").is_noun_like());
        assert!(!Term::constant("they").is_noun_like());
        assert!(!Term::var("X").is_noun_like());
    }
}
