//! Parallelization verdicts and clause suggestions.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analysis::{DepKind, LoopAnalysis, ReductionOp, ScalarKind};
use crate::frontend::{CanonicalLoop, Node, NodeKind, SkipRecord};

/// Chunk size used when branch imbalance suggests dynamic scheduling.
pub const DYNAMIC_CHUNK: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ReasonCode {
    IoCall,
    UnknownCall,
    CarriedFlowDep,
    CarriedAntiDep,
    CarriedOutputDep,
    CarriedScalar,
    NonCanonical,
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub code: ReasonCode,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Schedule {
    Static,
    Dynamic { chunk: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseSet {
    pub private: BTreeSet<String>,
    pub firstprivate: BTreeSet<String>,
    /// Variable to operator.
    pub reductions: BTreeMap<String, ReductionOp>,
    pub schedule: Schedule,
}

impl Default for ClauseSet {
    fn default() -> Self {
        ClauseSet {
            private: BTreeSet::new(),
            firstprivate: BTreeSet::new(),
            reductions: BTreeMap::new(),
            schedule: Schedule::Static,
        }
    }
}

impl ClauseSet {
    /// Clause text in the order private, firstprivate, reduction, schedule.
    ///
    /// Reductions sharing an operator are grouped. A static schedule is the
    /// default and is not spelled out.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let list = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        if !self.private.is_empty() {
            parts.push(format!("private({})", list(&self.private)));
        }
        if !self.firstprivate.is_empty() {
            parts.push(format!("firstprivate({})", list(&self.firstprivate)));
        }
        let mut by_op: BTreeMap<ReductionOp, Vec<&str>> = BTreeMap::new();
        for (v, op) in &self.reductions {
            by_op.entry(*op).or_default().push(v);
        }
        for (op, vars) in by_op {
            parts.push(format!("reduction({}:{})", op.symbol(), vars.join(", ")));
        }
        if let Schedule::Dynamic { chunk } = self.schedule {
            parts.push(format!("schedule(dynamic, {chunk})"));
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Parallelizable {
        clauses: ClauseSet,
    },
    Rejected {
        /// Sorted, without duplicates.
        reasons: Vec<ReasonCode>,
        evidence: Vec<Evidence>,
    },
}

impl Verdict {
    pub fn is_parallelizable(&self) -> bool {
        matches!(self, Verdict::Parallelizable { .. })
    }

    pub fn reasons(&self) -> &[ReasonCode] {
        match self {
            Verdict::Parallelizable { .. } => &[],
            Verdict::Rejected { reasons, .. } => reasons,
        }
    }

    pub fn clauses(&self) -> Option<&ClauseSet> {
        match self {
            Verdict::Parallelizable { clauses } => Some(clauses),
            Verdict::Rejected { .. } => None,
        }
    }

    fn rejected(mut evidence: Vec<Evidence>) -> Verdict {
        evidence.sort_by(|a, b| a.code.cmp(&b.code).then_with(|| a.detail.cmp(&b.detail)));
        evidence.dedup();
        let mut reasons: Vec<ReasonCode> = evidence.iter().map(|e| e.code).collect();
        reasons.dedup();
        Verdict::Rejected { reasons, evidence }
    }
}

/// Verdict for a loop the frontend could not put in canonical form.
pub fn judge_skipped(skip: &SkipRecord) -> Verdict {
    Verdict::rejected(vec![Evidence {
        code: ReasonCode::NonCanonical,
        detail: format!("{:?}: {}", skip.reason, skip.detail),
    }])
}

pub fn judge(a: &LoopAnalysis) -> Verdict {
    let mut ev = Vec::new();
    for c in &a.io_blockers {
        ev.push(Evidence {
            code: ReasonCode::IoCall,
            detail: format!("call to `{}` on line {}", c.callee, c.span.line),
        });
    }
    for c in &a.unknown_calls {
        ev.push(Evidence {
            code: ReasonCode::UnknownCall,
            detail: format!("call to `{}` on line {}", c.callee, c.span.line),
        });
    }
    for d in a.array_deps.iter().filter(|d| d.result.carried) {
        let code = match d.result.kind {
            Some(DepKind::Flow) | None => ReasonCode::CarriedFlowDep,
            Some(DepKind::Anti) => ReasonCode::CarriedAntiDep,
            Some(DepKind::Output) => ReasonCode::CarriedOutputDep,
        };
        let dist = d
            .result
            .distance
            .map(|x| format!("distance {x}"))
            .unwrap_or_else(|| "unknown distance".into());
        let src = &a.accesses[d.source];
        let snk = &a.accesses[d.sink];
        ev.push(Evidence {
            code,
            detail: format!(
                "`{}[{}]` and `{}[{}]`, {dist}{}",
                d.variable,
                src.index_text.join("]["),
                d.variable,
                snk.index_text.join("]["),
                if d.result.conservative { " (assumed)" } else { "" }
            ),
        });
    }
    for s in a.scalar_classes.iter().filter(|s| s.kind == ScalarKind::Carried) {
        ev.push(Evidence {
            code: ReasonCode::CarriedScalar,
            detail: format!("`{}`: {}", s.variable, s.detail),
        });
    }
    if a.loop_var_live_after {
        ev.push(Evidence {
            code: ReasonCode::CarriedScalar,
            detail: format!("`{}`: final value is used after the loop", a.lp.loop_var),
        });
    }
    if ev.is_empty() {
        Verdict::Parallelizable {
            clauses: suggest_clauses(a),
        }
    } else {
        Verdict::rejected(ev)
    }
}

/// Data-sharing and schedule clauses for a loop with no blockers.
pub fn suggest_clauses(a: &LoopAnalysis) -> ClauseSet {
    let mut cs = ClauseSet::default();
    for s in &a.scalar_classes {
        if s.local {
            continue;
        }
        match s.kind {
            ScalarKind::Private => {
                cs.private.insert(s.variable.clone());
            }
            ScalarKind::Reduction(op) => {
                cs.reductions.insert(s.variable.clone(), op);
            }
            _ => {}
        }
    }
    if has_unbalanced_branch(&a.lp.body) {
        cs.schedule = Schedule::Dynamic { chunk: DYNAMIC_CHUNK };
    }
    cs
}

/// Any `if` whose two arms differ in statement count; a missing arm counts zero.
pub fn has_unbalanced_branch(body: &Node) -> bool {
    body.any(&|n| {
        n.kind == NodeKind::If && {
            let then_n = n.children[1].count_statements();
            let else_n = n.children.get(2).map_or(0, Node::count_statements);
            then_n != else_n
        }
    })
}

/// Why a loop does (not) receive a directive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "selection", content = "by", rename_all = "snake_case")]
pub enum Selection {
    Chosen,
    /// Nested in the chosen loop with this id.
    InsideChosen(usize),
    /// The loop or an enclosing loop already carries an OpenMP directive.
    AlreadyAnnotated,
    NotParallelizable,
}

/// Pick the outermost parallelizable loop of every nest.
///
/// `annotated[i]` is true when loop `i` is directly preceded by an OpenMP
/// directive; such loops and everything inside them are left alone.
pub fn select_loops(loops: &[CanonicalLoop], verdicts: &[Verdict], annotated: &[bool]) -> Vec<Selection> {
    let mut out: Vec<Selection> = Vec::with_capacity(loops.len());
    for (i, lp) in loops.iter().enumerate() {
        let inherited = lp.parent.and_then(|p| match out[p] {
            Selection::Chosen => Some(Selection::InsideChosen(p)),
            s @ (Selection::InsideChosen(_) | Selection::AlreadyAnnotated) => Some(s),
            Selection::NotParallelizable => None,
        });
        let sel = if annotated[i] {
            Selection::AlreadyAnnotated
        } else if let Some(s) = inherited {
            s
        } else if verdicts[i].is_parallelizable() {
            Selection::Chosen
        } else {
            Selection::NotParallelizable
        };
        out.push(sel);
    }
    out
}
