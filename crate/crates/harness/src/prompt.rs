use argbind::datagen::{Instance, Question};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Qa,
    Fol,
}

impl FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "qa" => Ok(Task::Qa),
            "fol" => Ok(Task::Fol),
            _ => Err(format!("unknown task '{s}' (expected qa or fol)")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Qa => "qa",
            Task::Fol => "fol",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("a qa prompt needs a question")]
pub struct MissingQuestion;

/// One prompt. `id` is a question id for Q/A and an instance id for FOL.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: String,
    pub task: Task,
    pub prompt: String,
}

/// `{surface}\n\nQ: {question}\nA:` for Q/A, `{surface}\n\nFOL:` for FOL.
/// No in-context examples, no trailing whitespace.
pub fn build_prompt(inst: &Instance, q: Option<&Question>, task: Task) -> Result<String, MissingQuestion> {
    match task {
        Task::Qa => {
            let q = q.ok_or(MissingQuestion)?;
            Ok(format!("{}\n\nQ: {}\nA:", inst.surface, q.text))
        }
        Task::Fol => Ok(format!("{}\n\nFOL:", inst.surface)),
    }
}

/// Every prompt of a dataset in file order: one per question, or one per
/// instance for FOL.
pub fn prompts_for(ds: &[Instance], task: Task) -> Vec<PromptRecord> {
    let mut out = Vec::new();
    for inst in ds {
        match task {
            Task::Qa => {
                for q in &inst.questions {
                    let prompt = build_prompt(inst, Some(q), task).expect("question given");
                    out.push(PromptRecord { id: q.question_id.clone(), task, prompt });
                }
            }
            Task::Fol => {
                let prompt = build_prompt(inst, None, task).expect("fol needs no question");
                out.push(PromptRecord { id: inst.instance_id.clone(), task, prompt });
            }
        }
    }
    out
}
