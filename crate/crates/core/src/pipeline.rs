//! End-to-end processing of one source file.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze_loop, CallPolicy, LoopAnalysis};
use crate::backend::{parse_response, Backend, BackendError, PragmaPlan};
use crate::frontend::{locate_loops, FrontendError, LoopScan, SkipRecord, SourceFile};
use crate::prompting::{
    build_prompt, select_examples, tag_loop, IclCorpus, SelectError, TagSet, DEFAULT_K, DEFAULT_TOKEN_BUDGET,
};
use crate::rewriter::{
    diff_report, inject_pragmas, validate_plan, Injection, Placement, RewriteError, ValidationReport,
};
use crate::verdict::{judge, judge_skipped, select_loops, Selection, Verdict};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub k: usize,
    pub token_budget: usize,
    pub policy: CallPolicy,
    /// Re-prompt once with the rejection reasons.
    pub retry: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            k: DEFAULT_K,
            token_budget: DEFAULT_TOKEN_BUDGET,
            policy: CallPolicy::default(),
            retry: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error("backend failure: {0}")]
    Backend(#[from] BackendError),
}

/// Analysis of every loop in a file.
#[derive(Debug, Clone)]
pub struct FileAnalysis {
    pub source: SourceFile,
    pub scan: LoopScan,
    pub analyses: Vec<LoopAnalysis>,
    pub verdicts: Vec<Verdict>,
    pub selections: Vec<Selection>,
}

pub fn analyze_source(text: &str, policy: &CallPolicy) -> Result<FileAnalysis, FrontendError> {
    let source = SourceFile::parse(text)?;
    let scan = locate_loops(&source.ast);
    let analyses: Vec<LoopAnalysis> = scan.loops.iter().map(|l| analyze_loop(l, policy)).collect();
    let verdicts: Vec<Verdict> = analyses.iter().map(judge).collect();
    let annotated: Vec<bool> = scan
        .loops
        .iter()
        .map(|l| source.omp_pragma_before(l.span).is_some())
        .collect();
    let selections = select_loops(&scan.loops, &verdicts, &annotated);
    Ok(FileAnalysis {
        source,
        scan,
        analyses,
        verdicts,
        selections,
    })
}

impl FileAnalysis {
    pub fn chosen(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.selections.len()).filter(|&i| self.selections[i] == Selection::Chosen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptStatus {
    Accepted,
    /// The response did not parse into a plan.
    ParseRejected,
    /// The plan failed validation.
    GateRejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub status: AttemptStatus,
    pub response: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopStatus {
    Injected,
    /// Every attempt was rejected by the parser or the gate.
    PlanRejected,
    /// No prompt could be built.
    PromptFailed,
    RewriteFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopOutcome {
    pub status: LoopStatus,
    pub tags: TagSet,
    pub examples: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directive: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub attempts: Vec<Attempt>,
}

impl LoopOutcome {
    fn failed(status: LoopStatus, tags: TagSet, error: String) -> LoopOutcome {
        LoopOutcome {
            status,
            tags,
            examples: Vec::new(),
            directive: None,
            error: Some(error),
            attempts: Vec::new(),
        }
    }
}

/// Result of parallelizing one file.
#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub analysis: FileAnalysis,
    /// Indexed like `analysis.scan.loops`; `Some` for chosen loops.
    pub outcomes: Vec<Option<LoopOutcome>>,
    pub output_text: String,
    pub injected_at: Vec<Injection>,
    pub diff: String,
}

impl FileOutcome {
    pub fn eligible(&self) -> usize {
        self.outcomes.iter().flatten().count()
    }

    pub fn injected(&self) -> usize {
        self.outcomes
            .iter()
            .flatten()
            .filter(|o| o.status == LoopStatus::Injected)
            .count()
    }
}

fn attempt(text: String, a: &LoopAnalysis, v: &Verdict) -> (Attempt, Option<PragmaPlan>) {
    match parse_response(&text) {
        Err(e) => (
            Attempt {
                status: AttemptStatus::ParseRejected,
                response: text,
                error: Some(format!("{}: {e}", e.code())),
                validation: None,
            },
            None,
        ),
        Ok(plan) => {
            let report = validate_plan(&plan, a, v);
            let status = if report.accepted {
                AttemptStatus::Accepted
            } else {
                AttemptStatus::GateRejected
            };
            let keep = report.accepted.then_some(plan);
            (
                Attempt {
                    status,
                    response: text,
                    error: None,
                    validation: Some(report),
                },
                keep,
            )
        }
    }
}

fn feedback_for(last: &Attempt) -> String {
    let why = match (&last.error, &last.validation) {
        (Some(e), _) => e.clone(),
        (None, Some(v)) => v.summary(),
        (None, None) => String::new(),
    };
    format!(
        "Your previous answer was `{}`. It was rejected:\n{why}",
        last.response.trim()
    )
}

fn plan_loop(
    fa: &FileAnalysis,
    id: usize,
    corpus: &IclCorpus,
    backend: &dyn Backend,
    opts: &PipelineOptions,
) -> Result<(LoopOutcome, Option<PragmaPlan>), PipelineError> {
    let a = &fa.analyses[id];
    let v = &fa.verdicts[id];
    let tags = tag_loop(a);
    let examples = select_examples(&tags, corpus, opts.k)?;
    let clauses = v.clauses().cloned().unwrap_or_default();
    let loop_source = a.lp.span.text(&fa.source.text);
    let mut outcome = LoopOutcome {
        status: LoopStatus::PlanRejected,
        tags: tags.clone(),
        examples: examples.iter().map(|e| e.id.clone()).collect(),
        directive: None,
        error: None,
        attempts: Vec::new(),
    };
    let tries = if opts.retry { 2 } else { 1 };
    for _ in 0..tries {
        let feedback = outcome.attempts.last().map(feedback_for);
        let prompt = match build_prompt(
            loop_source,
            a,
            &clauses,
            &examples,
            opts.token_budget,
            feedback.as_deref(),
        ) {
            Ok(p) => p,
            Err(e) => return Ok((LoopOutcome::failed(LoopStatus::PromptFailed, tags, e.to_string()), None)),
        };
        let text = backend.complete(&prompt)?;
        let (att, plan) = attempt(text, a, v);
        outcome.attempts.push(att);
        if let Some(plan) = plan {
            outcome.status = LoopStatus::Injected;
            outcome.directive = Some(plan.raw_text.trim().to_string());
            return Ok((outcome, Some(plan)));
        }
    }
    Ok((outcome, None))
}

/// Prompt, validate and inject for every chosen loop of `text`.
pub fn parallelize_source(
    text: &str,
    file: &str,
    corpus: &IclCorpus,
    backend: &dyn Backend,
    opts: &PipelineOptions,
) -> Result<FileOutcome, PipelineError> {
    let fa = analyze_source(text, &opts.policy)?;
    let mut outcomes: Vec<Option<LoopOutcome>> = vec![None; fa.scan.loops.len()];
    let mut plans: Vec<(usize, PragmaPlan)> = Vec::new();
    for id in fa.chosen().collect::<Vec<_>>() {
        let (o, plan) = plan_loop(&fa, id, corpus, backend, opts)?;
        outcomes[id] = Some(o);
        if let Some(p) = plan {
            plans.push((id, p));
        }
    }

    // drop loops injection cannot handle, one at a time, until the rest go in
    let rewrite = loop {
        let placements: Vec<Placement<'_>> = plans
            .iter()
            .map(|(id, plan)| Placement {
                span: fa.scan.loops[*id].span,
                plan,
            })
            .collect();
        match inject_pragmas(text, file, &placements) {
            Ok(r) => break r,
            Err(e) => {
                let line = match &e {
                    RewriteError::OverlappingInjection { line } | RewriteError::LoopNotAtLineStart { line } => {
                        Some(*line)
                    }
                    RewriteError::SelfCheckFailed => None,
                };
                let bad: Vec<usize> = plans
                    .iter()
                    .filter(|(id, _)| line.is_none_or(|l| fa.scan.loops[*id].span.line == l))
                    .map(|(id, _)| *id)
                    .collect();
                for id in &bad {
                    if let Some(o) = outcomes[*id].as_mut() {
                        o.status = LoopStatus::RewriteFailed;
                        o.error = Some(e.to_string());
                    }
                }
                plans.retain(|(id, _)| !bad.contains(id));
            }
        }
    };
    let diff = diff_report(text, &rewrite.output_text, file);
    Ok(FileOutcome {
        analysis: fa,
        outcomes,
        output_text: rewrite.output_text,
        injected_at: rewrite.injected_at,
        diff,
    })
}

/// Serializable per-loop summary.
#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub id: usize,
    pub function: String,
    pub line: u32,
    pub depth: usize,
    pub loop_var: String,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub selection: Selection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<LoopAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<LoopOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedReport {
    #[serde(flatten)]
    pub record: SkipRecord,
    pub verdict: Verdict,
}

pub fn loop_reports(
    fa: &FileAnalysis,
    with_analysis: bool,
    outcomes: Option<&[Option<LoopOutcome>]>,
) -> Vec<LoopReport> {
    fa.scan
        .loops
        .iter()
        .enumerate()
        .map(|(i, lp)| LoopReport {
            id: lp.id,
            function: lp.function.clone(),
            line: lp.span.line,
            depth: lp.depth,
            loop_var: lp.loop_var.clone(),
            verdict: fa.verdicts[i].clone(),
            selection: fa.selections[i],
            analysis: with_analysis.then(|| fa.analyses[i].clone()),
            outcome: outcomes.and_then(|o| o[i].clone()),
        })
        .collect()
}

pub fn skipped_reports(fa: &FileAnalysis) -> Vec<SkippedReport> {
    fa.scan
        .skipped
        .iter()
        .map(|s| SkippedReport {
            record: s.clone(),
            verdict: judge_skipped(s),
        })
        .collect()
}
