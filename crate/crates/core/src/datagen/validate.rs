use super::generate::{DatasetId, Instance};
use super::question::{answer_text, parse_question, Answer, QType};
use crate::fol::{canonicalize, parse_fol, render_fol, Style};
use crate::predarg::{extract_structure, structures_equal, Lexicon, Repair};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Parse,
    Defective,
    RoundTrip,
    Template,
    Structure,
    Label,
    Oracle,
    QuestionType,
    QuestionCount,
    DuplicateId,
    Balance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Instance or question id; empty for dataset-level checks.
    pub id: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = serde_json::to_value(self.kind).ok();
        let kind = kind.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
        if self.id.is_empty() {
            write!(f, "[{kind}] {}", self.detail)
        } else {
            write!(f, "[{kind}] {}: {}", self.id, self.detail)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub instances: usize,
    pub questions: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, id: &str, detail: impl Into<String>) {
        self.violations.push(Violation { kind, id: id.to_string(), detail: detail.into() });
    }
}

/// Checks a dataset against its own templates and the answer oracle.
///
/// Per instance: the gold formula parses, is defect-free and round-trips in
/// both notations; re-filling the template from the stored properties gives
/// the same surface and formula; the extracted structure equals the
/// template's; every stored label equals the oracle answer; question types
/// match their text; question counts follow the dataset's dimensions.
/// Per dataset: ids are unique and yes/no are balanced overall and per
/// question type. Balance is computed from oracle answers, so one flipped
/// label is reported once, as a label violation.
pub fn validate_dataset(instances: &[Instance], lex: &Lexicon) -> ValidationReport {
    let mut report = ValidationReport { instances: instances.len(), ..Default::default() };
    let mut ids = BTreeSet::new();
    // (dataset, qtype) -> (yes, no)
    let mut tally: BTreeMap<(DatasetId, QType), (usize, usize)> = BTreeMap::new();

    for inst in instances {
        let id = inst.instance_id.as_str();
        if !ids.insert(id.to_string()) {
            report.push(ViolationKind::DuplicateId, id, "instance id repeated");
        }
        report.questions += inst.questions.len();
        for q in &inst.questions {
            if !ids.insert(q.question_id.clone()) {
                report.push(ViolationKind::DuplicateId, &q.question_id, "question id repeated");
            }
        }

        let rebuilt = match inst.rebuild() {
            Ok(r) => Some(r),
            Err(e) => {
                report.push(ViolationKind::Template, id, e.to_string());
                None
            }
        };

        let parsed = match parse_fol(&inst.gold_fol) {
            Ok(f) => Some(f),
            Err(e) => {
                report.push(ViolationKind::Parse, id, format!("gold FOL does not parse: {e}"));
                None
            }
        };
        let mut extracted = None;
        if let Some(f) = &parsed {
            for style in [Style::Unicode, Style::Ascii] {
                let text = render_fol(f, style);
                if parse_fol(&text).as_ref() != Ok(f) {
                    report.push(ViolationKind::RoundTrip, id, format!("{style:?} rendering does not round-trip"));
                }
            }
            let pc = canonicalize(f);
            if !pc.is_defect_free() {
                report.push(ViolationKind::Defective, id, format!("{:?}", pc.defects));
            } else {
                match extract_structure(&pc, lex, Repair::Off) {
                    Ok(s) => extracted = Some(s),
                    Err(e) => report.push(ViolationKind::Structure, id, e.to_string()),
                }
            }
        }

        if let Some(r) = &rebuilt {
            if r.surface != inst.surface {
                report.push(ViolationKind::Template, id, format!("surface differs from template fill {:?}", r.surface));
            }
            if parsed.as_ref().is_some_and(|f| *f != r.gold) {
                report.push(ViolationKind::Template, id, "gold FOL differs from template fill");
            }
            if let Some(s) = &extracted {
                if !structures_equal(s, &r.structure).unwrap_or(false) {
                    report.push(ViolationKind::Structure, id, "extracted structure differs from template bindings");
                }
            }
        }

        let expected = inst.dataset.questions_per_instance();
        let (i, j) = inst.dataset.dims();
        if inst.questions.len() != expected {
            report.push(
                ViolationKind::QuestionCount,
                id,
                format!("{} questions; {} expects {expected}", inst.questions.len(), inst.dataset),
            );
        }
        if inst.props[0].len() != i || inst.props[1].len() != j {
            report.push(
                ViolationKind::QuestionCount,
                id,
                format!(
                    "objects carry ({}, {}) properties; {} expects ({i}, {j})",
                    inst.props[0].len(),
                    inst.props[1].len(),
                    inst.dataset
                ),
            );
        }

        // the template's own structure is the reference; fall back to the
        // extracted one when the template cannot be re-filled
        let reference = rebuilt.as_ref().map(|r| &r.structure).or(extracted.as_ref());
        for q in &inst.questions {
            match parse_question(&q.text) {
                Ok(t) if t.qtype != q.qtype => report.push(
                    ViolationKind::QuestionType,
                    &q.question_id,
                    format!("text has the {} frame, stored as {}", t.qtype, q.qtype),
                ),
                Ok(_) => {}
                Err(e) => report.push(ViolationKind::QuestionType, &q.question_id, e.to_string()),
            }
            let Some(s) = reference else { continue };
            match answer_text(&q.text, s) {
                Ok(ans) => {
                    if ans != q.gold_answer {
                        report.push(
                            ViolationKind::Label,
                            &q.question_id,
                            format!("stored {}, oracle says {ans}", q.gold_answer),
                        );
                    }
                    let e = tally.entry((inst.dataset, q.qtype)).or_default();
                    match ans {
                        Answer::Yes => e.0 += 1,
                        Answer::No => e.1 += 1,
                    }
                }
                Err(e) => report.push(ViolationKind::Oracle, &q.question_id, e.to_string()),
            }
        }
    }

    let mut per_dataset: BTreeMap<DatasetId, (usize, usize)> = BTreeMap::new();
    for ((d, qt), (y, n)) in &tally {
        if y != n {
            report.push(ViolationKind::Balance, "", format!("{d} {qt}: {y} yes vs {n} no"));
        }
        let e = per_dataset.entry(*d).or_default();
        e.0 += y;
        e.1 += n;
    }
    for (d, (y, n)) in per_dataset {
        if y != n {
            report.push(ViolationKind::Balance, "", format!("{d}: {y} yes vs {n} no"));
        }
    }
    report
}
