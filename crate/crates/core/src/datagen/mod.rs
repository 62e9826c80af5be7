//! Template instantiation, balanced yes/no questions and a model-free
//! answer oracle for the binding datasets.
//!
//! A dataset `Dij` gives its first object `i` properties and its second `j`
//! (one color plus adjectives from distinct slots); `Dand` asks conjunctive
//! questions over the single-property templates.

mod generate;
mod io;
mod question;
mod template;
mod validate;
mod vocab;

pub use generate::{generate_dataset, Count, DatasetId, GenError, GenSpec, Instance, RebuildError};
pub use io::{parse_record, read_dataset, write_dataset};
pub use question::{
    answer_text, generate_questions, gold_answer, modified_text, original_text, parse_question, Answer, OracleError,
    QType, Question, QuestionTarget,
};
pub use template::{instantiate, Family, Instantiated, Property, SlotMismatch, Template, TEMPLATES};
pub use validate::{validate_dataset, ValidationReport, Violation, ViolationKind};
pub use vocab::{Slot, VocabError, Vocabulary, COLOR_SLOT};
