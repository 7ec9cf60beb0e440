//! Unified diffs of rewrites.

use similar::TextDiff;

/// Unified diff with three lines of context; empty when nothing changed.
pub fn diff_report(original: &str, rewritten: &str, name: &str) -> String {
    if original == rewritten {
        return String::new();
    }
    TextDiff::from_lines(original, rewritten)
        .unified_diff()
        .context_radius(3)
        .header(&format!("a/{name}"), &format!("b/{name}"))
        .to_string()
}
