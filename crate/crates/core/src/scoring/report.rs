use super::fol::{score_fol, taxonomy_keys, FolMetrics, FolPrediction};
use super::qa::{score_qa_views, PredArgQaMetrics, QaMetrics, QaPrediction};
use super::ScoreError;
use crate::datagen::{DatasetId, Instance};
use crate::fol::MatchPolicy;
use crate::predarg::Lexicon;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMetrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qa: Option<QaMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predarg_qa: Option<PredArgQaMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fol: Option<FolMetrics>,
}

/// All metrics of one model run. Serialized as JSON; rendered by
/// [`emit_report`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub run: String,
    /// Policy used for FOL accuracy, when FOL was scored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<MatchPolicy>,
    pub datasets: BTreeMap<DatasetId, DatasetMetrics>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("cannot merge run '{0}' into run '{1}'")]
    DifferentRuns(String, String),
    #[error("run '{run}' has {section} metrics for {dataset} twice")]
    Overlap { run: String, dataset: DatasetId, section: &'static str },
    #[error("run '{0}' was scored under two match policies")]
    PolicyConflict(String),
}

impl MetricsReport {
    pub fn from_qa(run: &str, ds: &[Instance], preds: &[QaPrediction]) -> Result<Self, ScoreError> {
        let (qa, mut pa) = score_qa_views(ds, preds)?;
        let datasets = qa
            .into_iter()
            .map(|(d, m)| (d, DatasetMetrics { qa: Some(m), predarg_qa: pa.remove(&d), fol: None }))
            .collect();
        Ok(MetricsReport { run: run.to_string(), policy: None, datasets })
    }

    pub fn from_fol(
        run: &str,
        ds: &[Instance],
        preds: &[FolPrediction],
        policy: MatchPolicy,
        lex: &Lexicon,
    ) -> Result<Self, ScoreError> {
        let datasets = score_fol(ds, preds, policy, lex)?
            .into_iter()
            .map(|(d, m)| (d, DatasetMetrics { fol: Some(m), ..Default::default() }))
            .collect();
        Ok(MetricsReport { run: run.to_string(), policy: Some(policy), datasets })
    }

    /// Adds the sections of `other` (same run) to `self`.
    pub fn merge(&mut self, other: MetricsReport) -> Result<(), MergeError> {
        if other.run != self.run {
            return Err(MergeError::DifferentRuns(other.run, self.run.clone()));
        }
        match (self.policy, other.policy) {
            (Some(a), Some(b)) if a != b => return Err(MergeError::PolicyConflict(self.run.clone())),
            (None, p) => self.policy = p,
            _ => {}
        }
        for (d, m) in other.datasets {
            let slot = self.datasets.entry(d).or_default();
            let overlap = |section| MergeError::Overlap { run: self.run.clone(), dataset: d, section };
            if m.qa.is_some() && slot.qa.is_some() {
                return Err(overlap("qa"));
            }
            if m.fol.is_some() && slot.fol.is_some() {
                return Err(overlap("fol"));
            }
            slot.qa = slot.qa.or(m.qa);
            slot.predarg_qa = slot.predarg_qa.or(m.predarg_qa);
            if m.fol.is_some() {
                slot.fol = m.fol;
            }
        }
        Ok(())
    }
}

/// Groups reports by run name, merging sections of the same run.
pub fn merge_reports(reports: Vec<MetricsReport>) -> Result<Vec<MetricsReport>, MergeError> {
    let mut by_run: BTreeMap<String, MetricsReport> = BTreeMap::new();
    for r in reports {
        match by_run.get_mut(&r.run) {
            Some(existing) => existing.merge(r)?,
            None => {
                by_run.insert(r.run.clone(), r);
            }
        }
    }
    Ok(by_run.into_values().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format '{s}' (expected markdown or csv)")),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
        }
    }
}

fn qa_notes(d: DatasetId, qa: &QaMetrics) -> Vec<String> {
    let mut notes = Vec::new();
    if qa.answered() == 0 {
        notes.push("no predictions".to_string());
    } else if qa.missing > 0 {
        notes.push(format!("{} missing", qa.missing));
    }
    if qa.unparseable > 0 {
        notes.push(format!("{} unparseable", qa.unparseable));
    }
    if d.is_conjunctive() {
        notes.push("and-question frames".to_string());
    }
    notes
}

fn fol_notes(fol: &FolMetrics) -> Vec<String> {
    let mut notes = Vec::new();
    if fol.answered() == 0 {
        notes.push("no predictions".to_string());
    } else if fol.missing > 0 {
        notes.push(format!("{} missing", fol.missing));
    }
    if fol.unparseable > 0 {
        notes.push(format!("{} unparseable", fol.unparseable));
    }
    notes
}

fn triple(overall: impl ToString, original: impl ToString, modified: impl ToString) -> String {
    format!("{} / {} / {}", overall.to_string(), original.to_string(), modified.to_string())
}

fn markdown(reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    let rows = |pick: fn(&DatasetMetrics) -> bool| {
        reports.iter().flat_map(move |r| r.datasets.iter().filter(move |(_, m)| pick(m)).map(move |(d, m)| (r, *d, m)))
    };

    if rows(|m| m.qa.is_some()).next().is_some() {
        out.push_str("## Question answering\n\nCells are overall / original / modified.\n\n");
        out.push_str("| Run | Dataset | Q/A Accuracy | Pred-Arg Accuracy | Answered no (org / mod) | Notes |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for (r, d, m) in rows(|m| m.qa.is_some()) {
            let qa = m.qa.as_ref().expect("filtered");
            let pa = m.predarg_qa.unwrap_or_default();
            let _ = writeln!(
                out,
                "| {} | {d} | {} | {} | {} / {} | {} |",
                r.run,
                triple(qa.overall().percent(), qa.original.percent(), qa.modified.percent()),
                triple(pa.overall(), pa.original.percent(), pa.modified.percent()),
                qa.no_original.percent(),
                qa.no_modified.percent(),
                qa_notes(d, qa).join("; "),
            );
        }
        out.push('\n');
    }

    if rows(|m| m.fol.is_some()).next().is_some() {
        out.push_str("## FOL translation\n\n");
        out.push_str(
            "Hallucination cases are #cases/#total: predictions with predicates, entities or unsegmentable \
             names absent from the gold formula of the same sentence.\n\n",
        );
        out.push_str("| Run | Dataset | Match policy | FOL Accuracy | Pred-Arg Accuracy | Hallucination | Notes |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for (r, d, m) in rows(|m| m.fol.is_some()) {
            let fol = m.fol.as_ref().expect("filtered");
            let policy = r.policy.unwrap_or_default();
            let _ = writeln!(
                out,
                "| {} | {d} | {policy} | {} | {} | {} | {} |",
                r.run,
                fol.accuracy.percent(),
                fol.predarg.percent(),
                fol.hallucination,
                fol_notes(fol).join("; "),
            );
        }
        out.push_str("\n### Error taxonomy\n\nPredictions per flag; one prediction may carry several.\n\n");
        let keys: Vec<&str> = taxonomy_keys().collect();
        let _ = writeln!(out, "| Run | Dataset | {} |", keys.join(" | "));
        let _ = writeln!(out, "|---|---|{}", "---|".repeat(keys.len()));
        for (r, d, m) in rows(|m| m.fol.is_some()) {
            let fol = m.fol.as_ref().expect("filtered");
            let cells: Vec<String> =
                keys.iter().map(|k| fol.taxonomy.get(*k).copied().unwrap_or(0).to_string()).collect();
            let _ = writeln!(out, "| {} | {d} | {} |", r.run, cells.join(" | "));
        }
    }
    out
}

pub const CSV_COLUMNS: [&str; 21] = [
    "run",
    "dataset",
    "qa_overall",
    "qa_original",
    "qa_modified",
    "predarg_qa_overall",
    "predarg_qa_original",
    "predarg_qa_modified",
    "no_original",
    "no_modified",
    "qa_questions",
    "qa_missing",
    "qa_unparseable",
    "match_policy",
    "fol_accuracy",
    "fol_predarg_accuracy",
    "hallucination_cases",
    "hallucination_total",
    "fol_missing",
    "fol_unparseable",
    "notes",
];

fn csv(reports: &[MetricsReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in reports {
        for (d, m) in &r.datasets {
            let mut row: Vec<String> = vec![r.run.clone(), d.to_string()];
            let mut notes = Vec::new();
            match &m.qa {
                Some(qa) => {
                    let pa = m.predarg_qa.unwrap_or_default();
                    row.extend([
                        qa.overall().percent().to_string(),
                        qa.original.percent().to_string(),
                        qa.modified.percent().to_string(),
                        pa.overall().to_string(),
                        pa.original.percent().to_string(),
                        pa.modified.percent().to_string(),
                        qa.no_original.percent().to_string(),
                        qa.no_modified.percent().to_string(),
                        qa.overall().total.to_string(),
                        qa.missing.to_string(),
                        qa.unparseable.to_string(),
                    ]);
                    notes.extend(qa_notes(*d, qa).into_iter().map(|n| format!("qa: {n}")));
                }
                None => row.extend(std::iter::repeat_n(String::new(), 11)),
            }
            match &m.fol {
                Some(fol) => {
                    row.extend([
                        r.policy.unwrap_or_default().to_string(),
                        fol.accuracy.percent().to_string(),
                        fol.predarg.percent().to_string(),
                        fol.hallucination.hits.to_string(),
                        fol.hallucination.total.to_string(),
                        fol.missing.to_string(),
                        fol.unparseable.to_string(),
                    ]);
                    notes.extend(fol_notes(fol).into_iter().map(|n| format!("fol: {n}")));
                }
                None => row.extend(std::iter::repeat_n(String::new(), 7)),
            }
            row.push(notes.join("; "));
            w.write_record(&row).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Renders reports as markdown tables or as CSV with [`CSV_COLUMNS`].
/// Percentages have one decimal, rounded half up.
pub fn emit_report(reports: &[MetricsReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => markdown(reports),
        ReportFormat::Csv => csv(reports),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Tally;

    fn qa_fixture() -> MetricsReport {
        // 87.2 / 94.1 / 80.3 needs equal frame counts: 941 and 803 of 1000
        let qa = QaMetrics {
            original: Tally::new(941, 1000),
            modified: Tally::new(803, 1000),
            no_original: Tally::new(500, 1000),
            no_modified: Tally::new(500, 1000),
            unparseable: 0,
            missing: 0,
        };
        let pa = PredArgQaMetrics { original: Tally::new(784, 1000), modified: Tally::new(396, 1000) };
        let mut datasets = BTreeMap::new();
        datasets.insert(DatasetId::D11, DatasetMetrics { qa: Some(qa), predarg_qa: Some(pa), fol: None });
        MetricsReport { run: "m".into(), policy: None, datasets }
    }

    fn fol_fixture(hits: u64, total: u64) -> MetricsReport {
        let fol = FolMetrics {
            accuracy: Tally::new(total / 2, total),
            predarg: Tally::new(total / 2, total),
            hallucination: Tally::new(hits, total),
            ..Default::default()
        };
        let mut datasets = BTreeMap::new();
        datasets.insert(DatasetId::D11, DatasetMetrics { fol: Some(fol), ..Default::default() });
        MetricsReport { run: "m".into(), policy: Some(MatchPolicy::Canonical), datasets }
    }

    #[test]
    fn markdown_cells() {
        let md = emit_report(&[qa_fixture()], ReportFormat::Markdown);
        assert!(md.contains("| m | D11 | 87.2 / 94.1 / 80.3 | 59.0 / 78.4 / 39.6 |"), "{md}");
        let md = emit_report(&[fol_fixture(12, 440)], ReportFormat::Markdown);
        assert!(md.contains("| m | D11 | canonical | 50.0 | 50.0 | 12/440 |"), "{md}");
    }

    #[test]
    fn merge_and_csv() {
        let mut r = qa_fixture();
        r.merge(fol_fixture(12, 440)).unwrap();
        assert!(r.merge(fol_fixture(1, 2)).is_err());
        let text = emit_report(&[r], ReportFormat::Csv);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "m,D11,87.2,94.1,80.3,59.0,78.4,39.6,50.0,50.0,2000,0,0,canonical,50.0,50.0,12,440,0,0,"
        );
    }

    #[test]
    fn empty_predictions_are_flagged() {
        let mut r = fol_fixture(0, 4);
        let fol = r.datasets.get_mut(&DatasetId::D11).unwrap().fol.as_mut().unwrap();
        fol.accuracy = Tally::new(0, 4);
        fol.predarg = Tally::new(0, 4);
        fol.missing = 4;
        let md = emit_report(&[r.clone()], ReportFormat::Markdown);
        assert!(md.contains("| 0.0 | 0.0 | 0/4 | no predictions |"), "{md}");
        assert!(emit_report(&[r], ReportFormat::Csv).contains("fol: no predictions"));
    }

    #[test]
    fn json_round_trip() {
        let mut r = qa_fixture();
        r.merge(fol_fixture(3, 10)).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains(r#""D11""#));
        assert_eq!(serde_json::from_str::<MetricsReport>(&text).unwrap(), r);
    }
}
