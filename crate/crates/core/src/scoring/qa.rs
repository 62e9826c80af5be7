use super::metrics::{Percent, Tally};
use super::ScoreError;
use crate::datagen::{Answer, DatasetId, Instance, QType};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictedAnswer {
    Yes,
    No,
    Unparseable,
}

impl From<Answer> for PredictedAnswer {
    fn from(a: Answer) -> Self {
        match a {
            Answer::Yes => PredictedAnswer::Yes,
            Answer::No => PredictedAnswer::No,
        }
    }
}

/// One line of a Q/A prediction file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPrediction {
    pub question_id: String,
    pub answer: PredictedAnswer,
}

/// The two question frames. `and-original` counts as original and
/// `and-modified` as modified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Frame {
    Original,
    Modified,
}

impl Frame {
    pub fn of(q: QType) -> Frame {
        if q.is_original_frame() {
            Frame::Original
        } else {
            Frame::Modified
        }
    }
}

/// Per-question accuracy for one dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaMetrics {
    pub original: Tally,
    pub modified: Tally,
    /// Questions answered "no", per frame.
    pub no_original: Tally,
    pub no_modified: Tally,
    pub unparseable: u64,
    pub missing: u64,
}

impl QaMetrics {
    pub fn overall(&self) -> Tally {
        self.original + self.modified
    }

    /// The pooled overall equals the mean of the frames when both frames have
    /// the same number of questions. `None` when the counts differ.
    pub fn mean_law(&self) -> Option<bool> {
        (self.original.total == self.modified.total)
            .then(|| self.overall().percent() == Percent::mean(self.original.percent(), self.modified.percent()))
    }

    pub fn answered(&self) -> u64 {
        self.overall().total - self.missing
    }
}

/// Per-instance all-correct rates for one dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredArgQaMetrics {
    /// Instances whose original-frame questions are all correct.
    pub original: Tally,
    pub modified: Tally,
}

impl PredArgQaMetrics {
    /// Mean of the two frame values, equivalently the rate over
    /// (instance, frame) pairs when every instance has both frames.
    pub fn overall(&self) -> Percent {
        Percent::mean(self.original.percent(), self.modified.percent())
    }
}

fn index_predictions<'a>(
    ds: &[Instance],
    preds: &'a [QaPrediction],
) -> Result<HashMap<&'a str, PredictedAnswer>, ScoreError> {
    let mut map = HashMap::with_capacity(preds.len());
    for p in preds {
        if map.insert(p.question_id.as_str(), p.answer).is_some() {
            return Err(ScoreError::DuplicatePrediction(p.question_id.clone()));
        }
    }
    let matched = ds.iter().flat_map(|i| &i.questions).filter(|q| map.contains_key(q.question_id.as_str())).count();
    if matched < map.len() {
        let known: HashSet<&str> = ds.iter().flat_map(|i| i.questions.iter().map(|q| q.question_id.as_str())).collect();
        let stray = preds.iter().find(|p| !known.contains(p.question_id.as_str())).expect("an unmatched prediction");
        return Err(ScoreError::UnknownQuestionId(stray.question_id.clone()));
    }
    Ok(map)
}

/// Outcome of one question: `None` when no prediction exists.
fn outcome(p: Option<&PredictedAnswer>, gold: Answer) -> (bool, Option<PredictedAnswer>) {
    match p {
        Some(&a) => (a == PredictedAnswer::from(gold), Some(a)),
        None => (false, None),
    }
}

type QaViews = (BTreeMap<DatasetId, QaMetrics>, BTreeMap<DatasetId, PredArgQaMetrics>);

/// Per-question accuracy and per-instance all-correct rates in one pass.
pub(crate) fn score_qa_views(ds: &[Instance], preds: &[QaPrediction]) -> Result<QaViews, ScoreError> {
    let map = index_predictions(ds, preds)?;
    let mut qa: BTreeMap<DatasetId, QaMetrics> = BTreeMap::new();
    let mut pa: BTreeMap<DatasetId, PredArgQaMetrics> = BTreeMap::new();
    for inst in ds {
        let m = qa.entry(inst.dataset).or_default();
        // all-correct per frame, for frames the instance has
        let mut all: [Option<bool>; 2] = [None, None];
        for q in &inst.questions {
            let (ok, given) = outcome(map.get(q.question_id.as_str()), q.gold_answer);
            let said_no = given == Some(PredictedAnswer::No);
            let frame = Frame::of(q.qtype);
            match frame {
                Frame::Original => {
                    m.original.record(ok);
                    m.no_original.record(said_no);
                }
                Frame::Modified => {
                    m.modified.record(ok);
                    m.no_modified.record(said_no);
                }
            }
            let slot = &mut all[frame as usize];
            *slot = Some(slot.unwrap_or(true) && ok);
            match given {
                None => m.missing += 1,
                Some(PredictedAnswer::Unparseable) => m.unparseable += 1,
                Some(_) => {}
            }
        }
        let p = pa.entry(inst.dataset).or_default();
        if let Some(ok) = all[Frame::Original as usize] {
            p.original.record(ok);
        }
        if let Some(ok) = all[Frame::Modified as usize] {
            p.modified.record(ok);
        }
    }
    for m in qa.values() {
        assert_ne!(m.mean_law(), Some(false), "pooled accuracy must equal the frame mean");
    }
    Ok((qa, pa))
}

/// Per-question accuracy. Missing and unparseable answers count as wrong.
pub fn score_qa(ds: &[Instance], preds: &[QaPrediction]) -> Result<BTreeMap<DatasetId, QaMetrics>, ScoreError> {
    score_qa_views(ds, preds).map(|(qa, _)| qa)
}

/// Per frame, the fraction of instances whose questions of that frame are
/// all answered correctly.
pub fn score_predarg_from_qa(
    ds: &[Instance],
    preds: &[QaPrediction],
) -> Result<BTreeMap<DatasetId, PredArgQaMetrics>, ScoreError> {
    score_qa_views(ds, preds).map(|(_, pa)| pa)
}
