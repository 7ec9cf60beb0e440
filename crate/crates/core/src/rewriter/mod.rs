//! Directive validation and source rewriting.

pub mod diff;
pub mod inject;
pub mod validate;

pub use diff::diff_report;
pub use inject::{inject_pragma, inject_pragmas, remove_lines, Injection, Placement, RewriteError, RewriteResult};
pub use validate::{validate_plan, ValidationReport, Violation, ViolationCode};
