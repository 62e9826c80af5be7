use super::vocab::COLOR_SLOT;
use crate::fol::{parse_fol, Formula, Term};
use crate::predarg::{Arg, EntityId, PredArgStructure};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Car,
    Bat,
    Shirt,
    Window,
    Glass,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Car, Family::Bat, Family::Shirt, Family::Window, Family::Glass];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Car => "car",
            Family::Bat => "bat",
            Family::Shirt => "shirt",
            Family::Window => "window",
            Family::Glass => "glass",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown template family '{s}'"))
    }
}

/// A sentence template. `col1`/`col2` in `surface` and `fol` stand for the
/// properties of the first and second object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub id: &'static str,
    pub family: Family,
    pub surface: &'static str,
    pub fol: &'static str,
    /// The property is separated from its noun.
    pub long_distance: bool,
    /// Accepts several properties per object (the five base templates).
    pub multiprop: bool,
    /// `col2 was not the color of the X but of the Y`.
    pub negation: bool,
    /// Nouns bound to `x` and `y`.
    pub objects: [&'static str; 2],
    /// Noun bound to `z`, if the template has a third entity.
    pub extra: Option<&'static str>,
    /// Relations over `x`, `y`, `z` and constants.
    pub relations: &'static [(&'static str, [&'static str; 2])],
}

impl Template {
    pub fn nouns(&self) -> impl Iterator<Item = &'static str> {
        self.objects.into_iter().chain(self.extra)
    }

    pub fn by_id(id: &str) -> Option<&'static Template> {
        TEMPLATES.iter().find(|t| t.id == id)
    }
}

const STANDING: &[(&str, [&str; 2])] = &[("standing-in-front-of", ["x", "y"])];
const INFRONT: &[(&str, [&str; 2])] = &[("infrontof", ["x", "y"])];
const PLAY: &[(&str, [&str; 2])] = &[("play-with", ["they", "x"]), ("play-with", ["they", "y"])];
const HIT: &[(&str, [&str; 2])] = &[("was-hit-by", ["x", "y"])];
const WEAR: &[(&str, [&str; 2])] = &[("wear", ["z", "x"]), ("wear", ["z", "y"])];
const WENT: &[(&str, [&str; 2])] = &[("went-with", ["x", "y"])];
const HAD: &[(&str, [&str; 2])] = &[("had", ["z", "x"]), ("had", ["z", "y"])];
const NEXT: &[(&str, [&str; 2])] = &[("next-to", ["x", "y"])];
const PLACED: &[(&str, [&str; 2])] = &[("placed-on", ["x", "y"])];

#[allow(clippy::too_many_arguments)] // one table column per argument
const fn row(
    id: &'static str,
    family: Family,
    kind: u8,
    surface: &'static str,
    fol: &'static str,
    objects: [&'static str; 2],
    extra: Option<&'static str>,
    relations: &'static [(&'static str, [&'static str; 2])],
) -> Template {
    // kind: 0 base, 1 long-distance, 2 negation (also long-distance)
    Template {
        id,
        family,
        surface,
        fol,
        long_distance: kind != 0,
        multiprop: kind == 0,
        negation: kind == 2,
        objects,
        extra,
        relations,
    }
}

use Family::*;

/// The 25 single-property templates, five per family, base template first.
pub static TEMPLATES: [Template; 25] = [
    row(
        "car-1",
        Car,
        0,
        "The col1 car was standing in front of a col2 house.",
        "∃x ∃y (Car(x) ∧ col1(x) ∧ House(y) ∧ col2(y) ∧ standing-in-front-of(x,y))",
        ["car", "house"],
        None,
        STANDING,
    ),
    row(
        "car-2",
        Car,
        1,
        "The car that was col1 was standing in front of a house that was col2.",
        "∃x ∃y (Car(x) ∧ col1(x) ∧ House(y) ∧ col2(y) ∧ standing-in-front-of(x,y))",
        ["car", "house"],
        None,
        STANDING,
    ),
    row(
        "car-3",
        Car,
        2,
        "col2 was not the color of the car but of the house.",
        "∃x ∃y (Car(x) ∧ ¬col2(x) ∧ House(y) ∧ col2(y))",
        ["car", "house"],
        None,
        &[],
    ),
    row(
        "car-4",
        Car,
        1,
        "col1 was the color of the car in front of col2 house.",
        "∃x ∃y (Car(x) ∧ col1(x) ∧ House(y) ∧ col2(y) ∧ infrontof(x,y))",
        ["car", "house"],
        None,
        INFRONT,
    ),
    row(
        "car-5",
        Car,
        1,
        "The car that was in front of the col2 house was col1.",
        "∃x ∃y (Car(x) ∧ col1(x) ∧ House(y) ∧ col2(y) ∧ infrontof(x,y))",
        ["car", "house"],
        None,
        INFRONT,
    ),
    row(
        "bat-1",
        Bat,
        0,
        "They played with a col1 ball and col2 bat.",
        "∃x ∃y (Ball(x) ∧ col1(x) ∧ Bat(y) ∧ col2(y) ∧ play-with(they,x) ∧ play-with(they,y))",
        ["ball", "bat"],
        None,
        PLAY,
    ),
    row(
        "bat-2",
        Bat,
        1,
        "The ball that they played with was col1 and the bat was col2.",
        "∃x ∃y (Ball(x) ∧ col1(x) ∧ Bat(y) ∧ col2(y) ∧ play-with(they,x) ∧ play-with(they,y))",
        ["ball", "bat"],
        None,
        PLAY,
    ),
    row(
        "bat-3",
        Bat,
        2,
        "col2 was not the color of the ball but of the bat.",
        "∃x ∃y (Ball(x) ∧ ¬col2(x) ∧ Bat(y) ∧ col2(y))",
        ["ball", "bat"],
        None,
        &[],
    ),
    row(
        "bat-4",
        Bat,
        1,
        "col1 was the color of the ball that was hit by the col2 bat.",
        "∃x ∃y (Ball(x) ∧ col1(x) ∧ Bat(y) ∧ col2(y) ∧ was-hit-by(x,y))",
        ["ball", "bat"],
        None,
        HIT,
    ),
    row(
        "bat-5",
        Bat,
        1,
        "The ball that was hit by the col2 bat was col1.",
        "∃x ∃y (Ball(x) ∧ col1(x) ∧ Bat(y) ∧ col2(y) ∧ was-hit-by(x,y))",
        ["ball", "bat"],
        None,
        HIT,
    ),
    row(
        "shirt-1",
        Shirt,
        0,
        "The man was wearing a col1 shirt and a col2 jacket.",
        "∃x ∃y ∃z (Shirt(x) ∧ col1(x) ∧ Jacket(y) ∧ col2(y) ∧ Man(z) ∧ wear(z,x) ∧ wear(z,y))",
        ["shirt", "jacket"],
        Some("man"),
        WEAR,
    ),
    row(
        "shirt-2",
        Shirt,
        1,
        "The shirt that the man wore was col1 and the jacket was col2.",
        "∃x ∃y ∃z (Shirt(x) ∧ col1(x) ∧ Jacket(y) ∧ col2(y) ∧ Man(z) ∧ wear(z,x) ∧ wear(z,y))",
        ["shirt", "jacket"],
        Some("man"),
        WEAR,
    ),
    row(
        "shirt-3",
        Shirt,
        2,
        "col2 was not the color of the shirt but of the jacket.",
        "∃x ∃y (Shirt(x) ∧ ¬col2(x) ∧ Jacket(y) ∧ col2(y))",
        ["shirt", "jacket"],
        None,
        &[],
    ),
    row(
        "shirt-4",
        Shirt,
        1,
        "col1 was the color of the shirt with the col2 jacket.",
        "∃x ∃y (Shirt(x) ∧ col1(x) ∧ Jacket(y) ∧ col2(y))",
        ["shirt", "jacket"],
        None,
        &[],
    ),
    row(
        "shirt-5",
        Shirt,
        1,
        "The shirt that went with col2 jacket was col1.",
        "∃x ∃y (Shirt(x) ∧ col1(x) ∧ Jacket(y) ∧ col2(y) ∧ went-with(x,y))",
        ["shirt", "jacket"],
        None,
        WENT,
    ),
    row(
        "window-1",
        Window,
        0,
        "The house had a col1 window and a col2 door.",
        "∃x ∃y ∃z (Window(x) ∧ col1(x) ∧ Door(y) ∧ col2(y) ∧ House(z) ∧ had(z,x) ∧ had(z,y))",
        ["window", "door"],
        Some("house"),
        HAD,
    ),
    row(
        "window-2",
        Window,
        1,
        "The window that was col1 was next to the door that was col2.",
        "∃x ∃y (Window(x) ∧ col1(x) ∧ Door(y) ∧ col2(y) ∧ next-to(x,y))",
        ["window", "door"],
        None,
        NEXT,
    ),
    row(
        "window-3",
        Window,
        2,
        "col2 was not the color of the window but of the door.",
        "∃x ∃y (Window(x) ∧ ¬col2(x) ∧ Door(y) ∧ col2(y))",
        ["window", "door"],
        None,
        &[],
    ),
    row(
        "window-4",
        Window,
        1,
        "col1 was the color of the window next to the col2 door.",
        "∃x ∃y (Window(x) ∧ col1(x) ∧ Door(y) ∧ col2(y) ∧ next-to(x,y))",
        ["window", "door"],
        None,
        NEXT,
    ),
    row(
        "window-5",
        Window,
        1,
        "The window that was next to the col2 door was col1.",
        "∃x ∃y (Window(x) ∧ col1(x) ∧ Door(y) ∧ col2(y) ∧ next-to(x,y))",
        ["window", "door"],
        None,
        NEXT,
    ),
    row(
        "glass-1",
        Glass,
        0,
        "A col1 glass was placed on a col2 table.",
        "∃x ∃y (Glass(x) ∧ col1(x) ∧ Table(y) ∧ col2(y) ∧ placed-on(x,y))",
        ["glass", "table"],
        None,
        PLACED,
    ),
    row(
        "glass-2",
        Glass,
        1,
        "The glass that was col1 was placed on a table that was col2.",
        "∃x ∃y (Glass(x) ∧ col1(x) ∧ Table(y) ∧ col2(y) ∧ placed-on(x,y))",
        ["glass", "table"],
        None,
        PLACED,
    ),
    // the table's color is the one named in the sentence
    row(
        "glass-3",
        Glass,
        2,
        "col2 was not the color of the glass but of the table.",
        "∃x ∃y (Glass(x) ∧ ¬col2(x) ∧ Table(y) ∧ col2(y))",
        ["glass", "table"],
        None,
        &[],
    ),
    row(
        "glass-4",
        Glass,
        1,
        "col1 was the color of the glass placed on the col2 table.",
        "∃x ∃y (Glass(x) ∧ col1(x) ∧ Table(y) ∧ col2(y) ∧ placed-on(x,y))",
        ["glass", "table"],
        None,
        PLACED,
    ),
    row(
        "glass-5",
        Glass,
        1,
        "The glass that was placed on a col2 table was col1.",
        "∃x ∃y (Glass(x) ∧ col1(x) ∧ Table(y) ∧ col2(y) ∧ placed-on(x,y))",
        ["glass", "table"],
        None,
        PLACED,
    ),
];

/// One property word assigned to an object. `negated` marks the object of a
/// negation template (`Red was not the color of the car`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Property {
    pub slot: String,
    pub word: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negated: bool,
}

impl Property {
    pub fn new(slot: &str, word: &str) -> Self {
        Property { slot: slot.to_string(), word: word.to_string(), negated: false }
    }

    pub fn color(word: &str) -> Self {
        Self::new(COLOR_SLOT, word)
    }

    pub fn negated(mut self) -> Self {
        self.negated = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{template}: {message}")]
pub struct SlotMismatch {
    pub template: String,
    pub message: String,
}

/// A filled template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instantiated {
    pub surface: String,
    pub gold: Formula,
    pub structure: PredArgStructure,
}

fn capitalize(w: &str) -> String {
    let mut cs = w.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

pub(crate) fn article_for(word: &str) -> &'static str {
    if word.starts_with(['a', 'e', 'i', 'o', 'u', 'A', 'E', 'I', 'O', 'U']) {
        "an"
    } else {
        "a"
    }
}

fn check(t: &Template, props: &[Vec<Property>; 2]) -> Result<(), SlotMismatch> {
    let fail = |message: String| Err(SlotMismatch { template: t.id.to_string(), message });
    if t.negation {
        let ok = matches!((&props[0][..], &props[1][..]), ([n], [p])
            if n.negated && !p.negated && n.slot == COLOR_SLOT && p.slot == COLOR_SLOT && n.word == p.word);
        if !ok {
            return fail("negation template takes one color, negated on the first object".into());
        }
        return Ok(());
    }
    for (k, ps) in props.iter().enumerate() {
        if ps.iter().any(|p| p.negated) {
            return fail(format!("object {} has a negated property", k + 1));
        }
        if ps.iter().filter(|p| p.slot == COLOR_SLOT).count() != 1 {
            return fail(format!("object {} needs exactly one color", k + 1));
        }
        if !t.multiprop && ps.len() != 1 {
            return fail(format!("object {} has {} properties; template takes one", k + 1, ps.len()));
        }
        let slots: BTreeSet<&str> = ps.iter().map(|p| p.slot.as_str()).collect();
        if slots.len() != ps.len() {
            return fail(format!("object {} uses a slot twice", k + 1));
        }
        if ps.iter().any(|p| p.word.is_empty() || p.word.contains(char::is_whitespace)) {
            return fail(format!("object {} has a malformed word", k + 1));
        }
    }
    if let Some(p) = props[0].iter().find(|p| props[1].iter().any(|q| q.word == p.word)) {
        return fail(format!("both objects are '{}'", p.word));
    }
    Ok(())
}

/// Property words of one object in noun-phrase order: adjectives in the
/// given order, then the color.
fn modifiers(ps: &[Property]) -> Vec<&str> {
    let mut out: Vec<&str> = ps.iter().filter(|p| p.slot != COLOR_SLOT).map(|p| p.word.as_str()).collect();
    out.extend(ps.iter().filter(|p| p.slot == COLOR_SLOT).map(|p| p.word.as_str()));
    out
}

/// Property words in gold-formula order: color first, then adjectives.
fn fol_words(ps: &[Property]) -> Vec<&str> {
    let mut out: Vec<&str> = ps.iter().filter(|p| p.slot == COLOR_SLOT).map(|p| p.word.as_str()).collect();
    out.extend(ps.iter().filter(|p| p.slot != COLOR_SLOT).map(|p| p.word.as_str()));
    out
}

fn fill_surface(t: &Template, fill: [String; 2]) -> String {
    let mut out: Vec<String> = Vec::new();
    for tok in t.surface.split(' ') {
        let slot = ["col1", "col2"].iter().position(|c| tok.starts_with(c));
        let Some(k) = slot else {
            out.push(tok.to_string());
            continue;
        };
        let text = &fill[k];
        if let Some(prev) = out.last_mut() {
            if matches!(prev.as_str(), "a" | "an" | "A" | "An") {
                let art = article_for(text);
                let upper = prev.starts_with('A');
                *prev = if upper { capitalize(art) } else { art.to_string() };
            }
        }
        out.push(format!("{text}{}", &tok[4..]));
    }
    capitalize(&out.join(" "))
}

/// Replaces `colN(v)` atoms (possibly negated) inside conjunctions by one
/// atom per word.
fn fill_fol(f: Formula, words: &[Vec<&str>; 2]) -> Formula {
    let slot_of = |pred: &str| match pred {
        "col1" => Some(0),
        "col2" => Some(1),
        _ => None,
    };
    let expand = |pred: &str, args: &[Term], neg: bool| -> Option<Vec<Formula>> {
        let k = slot_of(pred)?;
        Some(
            words[k]
                .iter()
                .map(|w| {
                    let a = Formula::atom(capitalize(w), args.to_vec());
                    if neg {
                        Formula::not(a)
                    } else {
                        a
                    }
                })
                .collect(),
        )
    };
    match f {
        Formula::Exists { var, body } => Formula::exists(var, fill_fol(*body, words)),
        Formula::And(cs) => {
            let mut out = Vec::new();
            for c in cs {
                let expanded = match &c {
                    Formula::Atom(a) => expand(&a.predicate, &a.args, false),
                    Formula::Not(inner) => match inner.as_ref() {
                        Formula::Atom(a) => expand(&a.predicate, &a.args, true),
                        _ => None,
                    },
                    _ => None,
                };
                match expanded {
                    Some(fs) => out.extend(fs),
                    None => out.push(fill_fol(c, words)),
                }
            }
            Formula::And(out)
        }
        Formula::Not(b) => Formula::not(fill_fol(*b, words)),
        atom => atom,
    }
}

fn structure(t: &Template, props: &[Vec<Property>; 2]) -> PredArgStructure {
    let mut s = PredArgStructure::new();
    for (noun, ps) in t.objects.iter().zip(props) {
        let pos = ps.iter().filter(|p| !p.negated).map(|p| p.word.as_str());
        let neg = ps.iter().filter(|p| p.negated).map(|p| p.word.as_str());
        s.add_entity(noun, pos, neg);
    }
    if let Some(noun) = t.extra {
        s.add_entity(noun, [], []);
    }
    for (pred, args) in t.relations {
        let args = args
            .iter()
            .map(|a| match *a {
                "x" => Arg::Entity(EntityId(0)),
                "y" => Arg::Entity(EntityId(1)),
                "z" => Arg::Entity(EntityId(2)),
                c => Arg::Const(c.to_string()),
            })
            .collect();
        s.add_relation(pred, args);
    }
    s
}

/// Fills `t` with the given properties of its two objects. Adjectives keep
/// their given order in the noun phrase and follow the color in the formula.
pub fn instantiate(t: &Template, props: &[Vec<Property>; 2]) -> Result<Instantiated, SlotMismatch> {
    check(t, props)?;
    let surface = if t.negation {
        fill_surface(t, [String::new(), props[1][0].word.clone()])
    } else {
        fill_surface(t, [modifiers(&props[0]).join(" "), modifiers(&props[1]).join(" ")])
    };
    let words = if t.negation {
        [Vec::new(), vec![props[1][0].word.as_str()]]
    } else {
        [fol_words(&props[0]), fol_words(&props[1])]
    };
    let pattern = parse_fol(t.fol).expect("template patterns parse");
    Ok(Instantiated { surface, gold: fill_fol(pattern, &words), structure: structure(t, props) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{canonicalize, render_fol, Style};
    use crate::predarg::{extract_structure, structures_equal, Lexicon, Repair};

    fn one(c1: &str, c2: &str) -> [Vec<Property>; 2] {
        [vec![Property::color(c1)], vec![Property::color(c2)]]
    }

    #[test]
    fn table_shape() {
        assert_eq!(TEMPLATES.len(), 25);
        for (i, t) in TEMPLATES.iter().enumerate() {
            assert_eq!(t.family, Family::ALL[i / 5]);
            assert_eq!(t.multiprop, i % 5 == 0, "{}", t.id);
            assert_eq!(t.negation, i % 5 == 2, "{}", t.id);
            assert_eq!(t.long_distance, i % 5 != 0, "{}", t.id);
        }
    }

    #[test]
    fn car_base_template() {
        let inst = instantiate(&TEMPLATES[0], &one("red", "blue")).unwrap();
        assert_eq!(inst.surface, "The red car was standing in front of a blue house.");
        assert_eq!(
            render_fol(&inst.gold, Style::Unicode),
            "∃x ∃y (Car(x) ∧ Red(x) ∧ House(y) ∧ Blue(y) ∧ standing-in-front-of(x,y))"
        );
    }

    #[test]
    fn multiprop_glass() {
        let props = [
            vec![Property::new("condition", "clean"), Property::color("red")],
            vec![Property::new("style", "modern"), Property::new("condition", "dirty"), Property::color("white")],
        ];
        let inst = instantiate(Template::by_id("glass-1").unwrap(), &props).unwrap();
        assert_eq!(inst.surface, "A clean red glass was placed on a modern dirty white table.");
        assert_eq!(
            render_fol(&inst.gold, Style::Unicode),
            "∃x ∃y (Glass(x) ∧ Red(x) ∧ Clean(x) ∧ Table(y) ∧ White(y) ∧ Modern(y) ∧ Dirty(y) ∧ placed-on(x,y))"
        );
    }

    #[test]
    fn articles_and_capitals() {
        let props = [vec![Property::new("style", "old"), Property::color("red")], vec![Property::color("blue")]];
        let inst = instantiate(Template::by_id("glass-1").unwrap(), &props).unwrap();
        assert_eq!(inst.surface, "An old red glass was placed on a blue table.");
        let inst = instantiate(Template::by_id("car-4").unwrap(), &one("red", "blue")).unwrap();
        assert_eq!(inst.surface, "Red was the color of the car in front of blue house.");
        let inst = instantiate(Template::by_id("window-1").unwrap(), &one("white", "orange")).unwrap();
        assert_eq!(inst.surface, "The house had a white window and an orange door.");
    }

    #[test]
    fn negation_template() {
        let t = Template::by_id("glass-3").unwrap();
        let props = [vec![Property::color("red").negated()], vec![Property::color("red")]];
        let inst = instantiate(t, &props).unwrap();
        assert_eq!(inst.surface, "Red was not the color of the glass but of the table.");
        assert_eq!(render_fol(&inst.gold, Style::Unicode), "∃x ∃y (Glass(x) ∧ ¬Red(x) ∧ Table(y) ∧ Red(y))");
        assert!(instantiate(t, &one("red", "blue")).is_err());
    }

    #[test]
    fn slot_mismatches() {
        let bat = Template::by_id("bat-1").unwrap();
        assert!(instantiate(bat, &one("red", "red")).is_err());
        let two = [vec![Property::new("style", "old"), Property::color("red")], vec![Property::color("blue")]];
        assert!(instantiate(Template::by_id("bat-2").unwrap(), &two).is_err());
        let no_color = [vec![Property::new("style", "old")], vec![Property::color("blue")]];
        assert!(instantiate(bat, &no_color).is_err());
        let twice = [
            vec![Property::new("style", "old"), Property::new("style", "new"), Property::color("red")],
            vec![Property::color("blue")],
        ];
        assert!(instantiate(bat, &twice).is_err());
    }

    #[test]
    fn gold_formulas_follow_the_table() {
        let lex = Lexicon::default_lexicon();
        for t in &TEMPLATES {
            let props = if t.negation {
                [vec![Property::color("blue").negated()], vec![Property::color("blue")]]
            } else {
                one("red", "blue")
            };
            let inst = instantiate(t, &props).unwrap();
            let rendered = render_fol(&inst.gold, Style::Unicode);
            // pure substitution of the pattern
            let expect = if t.negation {
                t.fol.replace("col2", "Blue")
            } else {
                t.fol.replace("col1", "Red").replace("col2", "Blue")
            };
            assert_eq!(rendered, expect, "{}", t.id);
            let pc = canonicalize(&parse_fol(&rendered).unwrap());
            assert!(pc.is_defect_free(), "{}", t.id);
            let extracted = extract_structure(&pc, &lex, Repair::Off).unwrap();
            assert!(structures_equal(&extracted, &inst.structure).unwrap(), "{}", t.id);
        }
    }
}
