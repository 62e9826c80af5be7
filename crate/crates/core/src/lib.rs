//! Tooling for probing whether language models recover predicate-argument
//! structure from simple two-object sentences.
//!
//! The crate is split along the pipeline:
//!
//! - [`fol`]: parse, print, canonicalize and compare formulas of the
//!   existential-conjunctive FOL fragment.
//! - [`predarg`]: turn canonical formulas into predicate-argument structures,
//!   repair glued predicates, and classify prediction errors.
//! - [`datagen`]: instantiate the sentence templates into datasets with gold
//!   formulas and balanced yes/no questions.
//! - [`scoring`]: Q/A, pred-arg and FOL metrics plus table-shaped reports.

pub mod datagen;
pub mod fol;
pub mod jsonl;
pub mod predarg;
pub mod scoring;
