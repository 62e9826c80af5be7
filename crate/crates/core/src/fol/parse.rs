//! Recursive-descent parser for the FOL surface language.
//!
//! ```text
//! F     ::= CONJ EOF
//! CONJ  ::= UNARY (("∧" | "&" | "and" | "AND") UNARY)*
//! UNARY ::= ("∃" | "exists") VAR "."? CONJ
//!         | ("¬" | "~" | "not") UNARY
//!         | "(" CONJ ")"
//!         | IDENT "(" TERM ("," TERM)* ")"
//! ```
//!
//! A quantifier's scope extends as far right as possible, so the prenex
//! prefix `∃x ∃y (...)` falls out of the same rule that also accepts the
//! non-prenex shapes models sometimes produce.

use super::{Atom, Formula, Term};
use std::fmt;
use thiserror::Error;

/// Depth bound for formula trees: every quantifier, negation, conjunction
/// and atom is one level. Deeper formulas are rejected.
pub const MAX_NESTING: usize = 64;

/// Recursion bound for the parser itself. Parentheses cost a frame without
/// adding a level, and any rendering of a formula within [`MAX_NESTING`]
/// needs at most two frames per level.
const MAX_FRAMES: usize = 4 * MAX_NESTING;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", ExpectedList(.expected))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

struct ExpectedList<'a>(&'a [&'static str]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            [] => f.write_str("nothing"),
            [one] => f.write_str(one),
            many => write!(f, "one of {}", many.join(", ")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Exists,
    And,
    Not,
    LParen,
    RParen,
    Comma,
    Dot,
    Ident(&'a str),
    Eof,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Exists => "quantifier".into(),
            Tok::And => "conjunction".into(),
            Tok::Not => "negation".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

const UNARY_START: &[&str] = &["quantifier", "negation", "'('", "identifier"];

fn lex(text: &str) -> Result<Vec<(Tok<'_>, usize)>, SyntaxError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '∃' => Tok::Exists,
            '∧' | '&' => Tok::And,
            '¬' | '~' => Tok::Not,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            c if c.is_alphabetic() => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '-' || c == '_' {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &text[start..end];
                toks.push((
                    match word {
                        "exists" => Tok::Exists,
                        "and" | "AND" => Tok::And,
                        "not" => Tok::Not,
                        _ => Tok::Ident(word),
                    },
                    start,
                ));
                continue;
            }
            other => {
                return Err(SyntaxError {
                    offset: start,
                    expected: UNARY_START.to_vec(),
                    found: format!("character {other:?}"),
                })
            }
        };
        chars.next();
        toks.push((tok, start));
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

/// Single lower-case letter optionally followed by digits: `x`, `y2`, `v10`.
/// Such tokens are variables even when unbound, which canonicalization then
/// reports as a free-variable defect.
fn is_variable_like(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_digit())
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    scope: Vec<&'a str>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Tok<'a> {
        self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.peek();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        SyntaxError { offset: self.offset(), expected: expected.to_vec(), found: self.peek().describe() }
    }

    fn expect(&mut self, tok: Tok<'a>, name: &'static str) -> Result<(), SyntaxError> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn ident(&mut self) -> Result<&'a str, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn conj(&mut self) -> Result<Formula, SyntaxError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Tok::And {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(Formula::and(items))
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.depth >= MAX_FRAMES {
            return Err(too_deep(self.offset()));
        }
        self.depth += 1;
        let out = self.unary_inner();
        self.depth -= 1;
        out
    }

    fn unary_inner(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Exists => {
                self.bump();
                let var = self.ident()?;
                if self.peek() == Tok::Dot {
                    self.bump();
                }
                self.scope.push(var);
                let body = self.conj();
                self.scope.pop();
                Ok(Formula::exists(var, body?))
            }
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.conj()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let mut args = vec![self.term()?];
                loop {
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                            args.push(self.term()?);
                        }
                        Tok::RParen => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.error(&["','", "')'"])),
                    }
                }
                Ok(Formula::Atom(Atom::new(name, args)))
            }
            _ => Err(self.error(UNARY_START)),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let name = self.ident()?;
        if self.scope.contains(&name) || is_variable_like(name) {
            Ok(Term::var(name))
        } else {
            Ok(Term::constant(name))
        }
    }
}

/// Parses `text` into a [`Formula`]. Whitespace is insignificant. Never
/// panics; malformed input yields a [`SyntaxError`] with the byte offset of
/// the offending token.
pub fn parse_fol(text: &str) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, scope: Vec::new(), depth: 0 };
    let f = p.conj()?;
    if p.peek() != Tok::Eof {
        return Err(p.error(&["conjunction", "end of input"]));
    }
    if tree_depth(&f) > MAX_NESTING {
        return Err(too_deep(0));
    }
    Ok(f)
}

fn too_deep(offset: usize) -> SyntaxError {
    SyntaxError { offset, expected: vec!["shallower nesting"], found: format!("nesting deeper than {MAX_NESTING}") }
}

fn tree_depth(f: &Formula) -> usize {
    let mut max = 0;
    let mut stack = vec![(f, 1)];
    while let Some((f, d)) = stack.pop() {
        max = max.max(d);
        match f {
            Formula::Atom(_) => {}
            Formula::Exists { body, .. } | Formula::Not(body) => stack.push((body, d + 1)),
            Formula::And(cs) => stack.extend(cs.iter().map(|c| (c, d + 1))),
        }
    }
    max
}
