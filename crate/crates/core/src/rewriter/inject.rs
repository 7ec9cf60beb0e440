//! Textual directive insertion.

use serde::Serialize;
use thiserror::Error;

use crate::backend::PragmaPlan;
use crate::frontend::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum RewriteError {
    #[error("two directives target line {line}")]
    OverlappingInjection { line: u32 },
    #[error("loop on line {line} does not start its line; cannot insert a directive above it")]
    LoopNotAtLineStart { line: u32 },
    #[error("rewrite self-check failed: removing the injected lines does not give the input back")]
    SelfCheckFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Injection {
    pub file: String,
    /// 1-based line of the directive in the output.
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewriteResult {
    #[serde(skip)]
    pub output_text: String,
    pub injected_at: Vec<Injection>,
    pub plans: Vec<PragmaPlan>,
}

/// One directive to place above the loop starting at `span`.
#[derive(Debug, Clone)]
pub struct Placement<'a> {
    pub span: SourceSpan,
    pub plan: &'a PragmaPlan,
}

fn line_start(src: &str, at: usize) -> usize {
    src[..at].rfind('\n').map_or(0, |p| p + 1)
}

fn line_ending(src: &str, from: usize) -> &'static str {
    match src[from..].find('\n') {
        Some(p) if p > 0 && src.as_bytes()[from + p - 1] == b'\r' => "\r\n",
        _ => "\n",
    }
}

/// Insert each plan's directive on its own line above its loop.
///
/// Indentation copies the loop line's leading whitespace and the line
/// ending matches the loop line. Every other byte is kept.
pub fn inject_pragmas(source: &str, file: &str, placements: &[Placement<'_>]) -> Result<RewriteResult, RewriteError> {
    let mut edits: Vec<(usize, String, u32, &PragmaPlan)> = Vec::new();
    for p in placements {
        let start = line_start(source, p.span.start_byte);
        let indent = &source[start..p.span.start_byte];
        if !indent.chars().all(|c| c == ' ' || c == '\t') {
            return Err(RewriteError::LoopNotAtLineStart { line: p.span.line });
        }
        if edits.iter().any(|(s, ..)| *s == start) {
            return Err(RewriteError::OverlappingInjection { line: p.span.line });
        }
        let text = format!("{indent}{}{}", p.plan.raw_text.trim(), line_ending(source, start));
        edits.push((start, text, p.span.line, p.plan));
    }
    edits.sort_by_key(|(s, ..)| *s);

    let mut out = String::with_capacity(source.len() + edits.iter().map(|e| e.1.len()).sum::<usize>());
    let mut injected_at = Vec::new();
    let mut plans = Vec::new();
    let mut cursor = 0;
    for (n, (start, text, line, plan)) in edits.iter().enumerate() {
        out.push_str(&source[cursor..*start]);
        out.push_str(text);
        cursor = *start;
        injected_at.push(Injection {
            file: file.to_string(),
            line: *line + n as u32,
        });
        plans.push((*plan).clone());
    }
    out.push_str(&source[cursor..]);

    let lines: Vec<u32> = injected_at.iter().map(|i| i.line).collect();
    if remove_lines(&out, &lines) != source {
        return Err(RewriteError::SelfCheckFailed);
    }
    Ok(RewriteResult {
        output_text: out,
        injected_at,
        plans,
    })
}

/// Single-loop form of [`inject_pragmas`].
pub fn inject_pragma(
    source: &str,
    file: &str,
    span: SourceSpan,
    plan: &PragmaPlan,
) -> Result<RewriteResult, RewriteError> {
    inject_pragmas(source, file, &[Placement { span, plan }])
}

/// `text` without the given 1-based lines (each with its line ending).
pub fn remove_lines(text: &str, lines: &[u32]) -> String {
    text.split_inclusive('\n')
        .enumerate()
        .filter(|(i, _)| !lines.contains(&(*i as u32 + 1)))
        .map(|(_, l)| l)
        .collect()
}
