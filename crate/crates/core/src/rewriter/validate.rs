//! The analysis-backed gate every proposed directive must pass.

use serde::Serialize;
use std::collections::BTreeSet;

use crate::analysis::{AccessMode, LoopAnalysis, ScalarKind};
use crate::backend::PragmaPlan;
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationCode {
    PragmaOnRejectedLoop,
    MissingReduction,
    SpuriousReduction,
    MissingPrivate,
    SharedWrittenScalar,
    UnknownVariableInClause,
    /// An array named in `private`/`firstprivate`/`reduction`.
    PrivatizedArray,
    /// `private` on a variable whose incoming value is read.
    PrivatizedLiveIn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    /// One line per violation, for re-prompting.
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{:?}: {}", v.code, v.detail))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Check `plan` against the facts for its loop.
pub fn validate_plan(plan: &PragmaPlan, a: &LoopAnalysis, verdict: &Verdict) -> ValidationReport {
    let mut v = Vec::new();
    let mut push = |code, detail: String| v.push(Violation { code, detail });

    if let Verdict::Rejected { reasons, .. } = verdict {
        let list: Vec<String> = reasons.iter().map(|r| r.to_string()).collect();
        push(
            ViolationCode::PragmaOnRejectedLoop,
            format!("loop was rejected: {}", list.join(", ")),
        );
    }

    let private = plan.private_vars();
    let firstprivate = plan.firstprivate_vars();
    let reductions = plan.reductions();
    let named = plan.named_vars();
    let loop_var = a.lp.loop_var.as_str();

    // names visible at the directive: everything the loop touches, minus body locals
    let bounds: Vec<String> =
        a.lp.lower
            .referenced_names()
            .into_iter()
            .chain(a.lp.upper.referenced_names())
            .collect();
    let visible: BTreeSet<&str> = a
        .accesses
        .iter()
        .filter(|x| !x.body_local)
        .map(|x| x.variable.as_str())
        .chain(bounds.iter().map(String::as_str))
        .chain(std::iter::once(loop_var))
        .collect();
    for name in &named {
        if !visible.contains(name) {
            push(
                ViolationCode::UnknownVariableInClause,
                format!("`{name}` is not a variable used by the loop"),
            );
        } else if a.lp.arrays.contains_key(*name) {
            push(ViolationCode::PrivatizedArray, format!("`{name}` is an array"));
        } else if private.contains(name) && *name != loop_var {
            let live_in = a
                .scalar(name)
                .is_none_or(|s| matches!(s.kind, ScalarKind::ReadOnlyShared | ScalarKind::Carried));
            if live_in {
                push(
                    ViolationCode::PrivatizedLiveIn,
                    format!("`{name}` is read before it is written; private leaves it uninitialized"),
                );
            }
        }
    }

    for (name, _) in &reductions {
        let is_red = a
            .scalar(name)
            .is_some_and(|s| matches!(s.kind, ScalarKind::Reduction(_)));
        if !is_red {
            push(
                ViolationCode::SpuriousReduction,
                format!("`{name}` is not a reduction variable"),
            );
        }
    }

    for s in a.scalar_classes.iter().filter(|s| !s.local && s.variable != loop_var) {
        let name = s.variable.as_str();
        let red = reductions.iter().find(|(n, _)| *n == name).map(|(_, op)| *op);
        if let ScalarKind::Reduction(op) = s.kind {
            match red {
                Some(got) if got == op => {}
                Some(got) => push(
                    ViolationCode::MissingReduction,
                    format!("`{name}` needs reduction({op}:{name}), plan has reduction({got}:{name})"),
                ),
                None => push(
                    ViolationCode::MissingReduction,
                    format!("`{name}` needs reduction({op}:{name})"),
                ),
            }
        }
        if s.kind == ScalarKind::Private && !private.contains(name) && !firstprivate.contains(name) {
            push(ViolationCode::MissingPrivate, format!("`{name}` must be private"));
        }
        let written = a
            .accesses
            .iter()
            .any(|x| x.variable == name && x.mode == AccessMode::Write);
        if written && !named.contains(name) {
            push(
                ViolationCode::SharedWrittenScalar,
                format!("`{name}` is written but would stay shared"),
            );
        }
    }

    v.sort_by(|x, y| x.code.cmp(&y.code).then_with(|| x.detail.cmp(&y.detail)));
    v.dedup();
    ValidationReport {
        accepted: v.is_empty(),
        violations: v,
    }
}
