//! Predicate-argument structures: which predicates hold of which entities,
//! and which entities fill which places of relations.

mod classify;
mod glue;
mod lexicon;
mod structure;

pub use classify::{classify_errors, detect_hallucination, ErrorFlag, ErrorTaxonomy, HallucinationReport};
pub use glue::{split_glued, Unsplittable};
pub use lexicon::{parse_sections, Lexicon, LexiconError, Section, DEFAULT_VOCAB};
pub use structure::{
    extract_structure, normalize_noun_argument, structures_equal, Arg, EntityBinding, EntityId, ExtractFailure,
    PredArgStructure, Relation, Repair, TooManyEntities, MAX_ENTITIES,
};
