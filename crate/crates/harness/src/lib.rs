//! Command-line front end for the argbind probes: dataset generation and
//! validation, prompt construction, live model runs over a
//! chat-completions endpoint, scoring and reports.

pub mod answer;
pub mod cli;
pub mod client;
pub mod config;
pub mod prompt;

pub use answer::parse_model_answer;
pub use client::{
    call_model, parse_completion, parse_retry_after, read_log, Endpoint, Generation, LogRecord, RunSummary,
};
pub use config::{Mode, RunConfig};
pub use prompt::{build_prompt, prompts_for, MissingQuestion, PromptRecord, Task};
