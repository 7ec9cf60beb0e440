//! Analysis-gated OpenMP `parallel for` synthesis for a C subset.
//!
//! The pipeline parses C source, finds canonical loops, decides which of
//! them are safe to parallelize, asks a completion backend for a directive
//! using in-context examples plus the analysis facts, validates the answer
//! against those facts and injects accepted directives textually.

pub mod analysis;
pub mod backend;
pub mod cli;
pub mod frontend;
pub mod harness;
pub mod pipeline;
pub mod prompting;
pub mod rewriter;
pub mod verdict;
