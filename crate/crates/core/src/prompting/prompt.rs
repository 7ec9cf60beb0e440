//! Deterministic prompt rendering.

use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

use super::corpus::IclExample;
use crate::analysis::{LoopAnalysis, ScalarKind};
use crate::verdict::ClauseSet;

pub const SYSTEM_PREAMBLE: &str = "You are an expert in shared-memory parallel programming with OpenMP 4.5 for C.
You add OpenMP directives to sequential loops. You never change the loop body, the loop header, or any other code.
The FACTS section below comes from an exact static analysis of the target loop; it is correct and must be respected.";

pub const OUTPUT_CONTRACT: &str = "Respond with exactly one line: the `#pragma omp parallel for` directive for the target loop, with any clauses it needs.
Do not repeat the loop. Do not add explanations.";

/// Line prefix of the suggested clauses inside the FACTS section.
pub const SUGGESTED_CLAUSES_PREFIX: &str = "- suggested clauses: ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("the target loop alone needs {needed} tokens, budget is {budget}")]
    TokenBudgetExceeded { needed: usize, budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prompt {
    pub system_preamble: String,
    pub examples: Vec<IclExample>,
    pub target_block: String,
    pub output_contract: String,
    /// Gate violations from a previous attempt, for one repair round.
    pub feedback: Option<String>,
}

/// Token estimate: one token per four bytes, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

impl Prompt {
    /// Everything except the system preamble, as sent in the user message.
    pub fn render_user(&self) -> String {
        let mut out = String::new();
        out.push_str("## Examples\n");
        if self.examples.is_empty() {
            out.push_str("(none)\n");
        }
        for (n, ex) in self.examples.iter().enumerate() {
            let tags: Vec<&str> = ex.pattern_tags.iter().map(|t| t.as_str()).collect();
            let _ = write!(
                out,
                "\n### Example {}: {} [{}]\nSequential:\n```c\n{}```\nParallel:\n```c\n{}```\nWhy:\n{}",
                n + 1,
                ex.id,
                tags.join(", "),
                with_newline(&ex.sequential_code),
                with_newline(&ex.parallel_code),
                with_newline(&ex.explanation),
            );
        }
        out.push_str("\n## Target\n");
        out.push_str(&self.target_block);
        if let Some(fb) = &self.feedback {
            out.push_str("\n## Feedback\nYour previous directive was rejected by the validator:\n");
            out.push_str(&with_newline(fb));
        }
        out.push_str("\n## Output\n");
        out.push_str(&with_newline(&self.output_contract));
        out
    }

    pub fn render(&self) -> String {
        format!("{}\n\n{}", self.system_preamble, self.render_user())
    }

    pub fn tokens(&self) -> usize {
        estimate_tokens(&self.render())
    }
}

fn with_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

/// Target loop source followed by the FACTS section.
pub fn target_block(loop_source: &str, analysis: &LoopAnalysis, clauses: &ClauseSet) -> String {
    let mut out = String::new();
    let _ = write!(out, "```c\n{}```\nFACTS\n", with_newline(loop_source));
    let _ = writeln!(out, "- loop variable: {} (implicitly private)", analysis.lp.loop_var);
    for s in &analysis.scalar_classes {
        if s.variable == analysis.lp.loop_var {
            continue;
        }
        let class = match s.kind {
            ScalarKind::Private if s.local => "private (declared in the body, needs no clause)".to_string(),
            ScalarKind::Private => "private".to_string(),
            ScalarKind::Reduction(op) => format!("reduction with operator {op}"),
            ScalarKind::ReadOnlyShared => "read-only, shared".to_string(),
            ScalarKind::Induction => "induction".to_string(),
            ScalarKind::Carried => "carried".to_string(),
        };
        let _ = writeln!(out, "- scalar {}: {class}", s.variable);
    }
    let carried = analysis.array_deps.iter().filter(|d| d.result.carried).count();
    let _ = writeln!(
        out,
        "- arrays: no loop-carried dependences ({} same-iteration pairs)",
        analysis.array_deps.len() - carried
    );
    let rendered = clauses.render();
    let _ = writeln!(
        out,
        "{SUGGESTED_CLAUSES_PREFIX}{}",
        if rendered.is_empty() {
            "(none)"
        } else {
            rendered.as_str()
        }
    );
    out
}

/// Assemble a prompt within `budget` tokens, dropping trailing examples first.
pub fn build_prompt(
    loop_source: &str,
    analysis: &LoopAnalysis,
    clauses: &ClauseSet,
    examples: &[&IclExample],
    budget: usize,
    feedback: Option<&str>,
) -> Result<Prompt, PromptError> {
    let mut prompt = Prompt {
        system_preamble: SYSTEM_PREAMBLE.to_string(),
        examples: Vec::new(),
        target_block: target_block(loop_source, analysis, clauses),
        output_contract: OUTPUT_CONTRACT.to_string(),
        feedback: feedback.map(str::to_string),
    };
    let needed = prompt.tokens();
    if needed > budget {
        return Err(PromptError::TokenBudgetExceeded { needed, budget });
    }
    prompt.examples = examples.iter().map(|e| (*e).clone()).collect();
    while prompt.tokens() > budget {
        prompt.examples.pop();
    }
    Ok(prompt)
}

/// Recover the suggested clause text from a rendered prompt.
pub fn suggested_clauses(rendered: &str) -> Option<&str> {
    let facts = &rendered[rendered.find("\nFACTS\n")?..];
    let line = facts.lines().find_map(|l| l.strip_prefix(SUGGESTED_CLAUSES_PREFIX))?;
    Some(if line == "(none)" { "" } else { line })
}
