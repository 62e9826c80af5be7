use super::{Atom, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Style {
    /// `∃x ∃y (Red(x) ∧ ¬Car(y))`
    #[default]
    Unicode,
    /// `exists x. exists y. (Red(x) & ~Car(y))`
    Ascii,
}

impl Style {
    fn conj(self) -> &'static str {
        match self {
            Style::Unicode => " ∧ ",
            Style::Ascii => " & ",
        }
    }

    fn neg(self) -> &'static str {
        match self {
            Style::Unicode => "¬",
            Style::Ascii => "~",
        }
    }

    fn quant(self, var: &str, out: &mut String) {
        match self {
            Style::Unicode => {
                out.push('∃');
                out.push_str(var);
            }
            Style::Ascii => {
                out.push_str("exists ");
                out.push_str(var);
                out.push('.');
            }
        }
    }
}

/// Prints `f` deterministically. Parsing the output yields a formula
/// structurally equal to `f` in both styles.
pub fn render_fol(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    write_formula(f, style, &mut out);
    out
}

fn write_atom(a: &Atom, out: &mut String) {
    out.push_str(&a.predicate);
    out.push('(');
    for (i, t) in a.args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(t.name());
    }
    out.push(')');
}

fn write_formula(f: &Formula, style: Style, out: &mut String) {
    match f {
        Formula::Atom(a) => write_atom(a, out),
        Formula::Exists { .. } => {
            let mut cur = f;
            let mut first = true;
            while let Formula::Exists { var, body } = cur {
                if !first {
                    out.push(' ');
                }
                first = false;
                style.quant(var, out);
                cur = body;
            }
            out.push(' ');
            match cur {
                Formula::And(_) => write_parenthesized(cur, style, out),
                _ => write_formula(cur, style, out),
            }
        }
        Formula::And(cs) => {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(style.conj());
                }
                match c {
                    Formula::And(_) | Formula::Exists { .. } => write_parenthesized(c, style, out),
                    _ => write_formula(c, style, out),
                }
            }
        }
        Formula::Not(body) => {
            out.push_str(style.neg());
            match **body {
                Formula::And(_) | Formula::Exists { .. } => write_parenthesized(body, style, out),
                _ => write_formula(body, style, out),
            }
        }
    }
}

fn write_parenthesized(f: &Formula, style: Style, out: &mut String) {
    out.push('(');
    write_formula(f, style, out);
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_fol, Term};

    fn red_car() -> Formula {
        Formula::exists_all(
            &["x", "y"],
            Formula::And(vec![
                Formula::Atom(Atom::over_vars("Red", &["x"])),
                Formula::Atom(Atom::over_vars("Car", &["x"])),
                Formula::Atom(Atom::over_vars("Blue", &["y"])),
                Formula::Atom(Atom::over_vars("House", &["y"])),
                Formula::Atom(Atom::over_vars("Infrontof", &["x", "y"])),
            ]),
        )
    }

    #[test]
    fn single_atom() {
        let f = Formula::atom("Car", vec![Term::var("x")]);
        assert_eq!(render_fol(&f, Style::Unicode), "Car(x)");
        assert_eq!(render_fol(&f, Style::Ascii), "Car(x)");
    }

    #[test]
    fn unicode_notation() {
        assert_eq!(
            render_fol(&red_car(), Style::Unicode),
            "∃x ∃y (Red(x) ∧ Car(x) ∧ Blue(y) ∧ House(y) ∧ Infrontof(x,y))"
        );
    }

    #[test]
    fn ascii_spelling() {
        let s = render_fol(&red_car(), Style::Ascii);
        assert_eq!(s, "exists x. exists y. (Red(x) & Car(x) & Blue(y) & House(y) & Infrontof(x,y))");
        assert_eq!(parse_fol(&s).unwrap(), red_car());
    }

    #[test]
    fn nested_shapes_round_trip() {
        for text in [
            "A(x) ∧ (B(x) ∧ C(x))",
            "(A(x) ∧ B(x)) ∧ C(x)",
            "¬(A(x) ∧ B(x))",
            "¬¬A(x)",
            "¬∃x A(x)",
            "(∃x A(x)) ∧ B(c)",
            "A(c) ∧ ∃x (B(x) ∧ C(x))",
            "∃x ¬A(x)",
            "∃x A(x)",
            "∃x ∃y (¬(P(x) ∧ Q(y)) ∧ R(x,y,they))",
        ] {
            let f = parse_fol(text).unwrap();
            for style in [Style::Unicode, Style::Ascii] {
                let s = render_fol(&f, style);
                assert_eq!(parse_fol(&s).unwrap(), f, "{text} -> {s}");
            }
        }
    }
}
