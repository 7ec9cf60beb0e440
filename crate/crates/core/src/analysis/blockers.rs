//! Calls that prevent parallelization.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::frontend::{Node, NodeKind, SourceSpan};

/// Functions whose calls are I/O and always block.
pub const IO_FUNCTIONS: &[&str] = &[
    "printf", "fprintf", "sprintf", "snprintf", "puts", "putchar", "fputs", "fputc", "scanf", "fscanf", "sscanf",
    "fopen", "fclose", "fread", "fwrite", "fflush", "getchar", "gets", "fgets", "perror", "write", "read",
];

/// Side-effect-free math functions allowed by default.
pub const PURE_FUNCTIONS: &[&str] = &[
    "sqrt", "sin", "cos", "tan", "exp", "log", "fabs", "pow", "floor", "ceil", "fmin", "fmax", "abs", "min", "max",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallPolicy {
    /// Calls treated as pure.
    pub allowed: BTreeSet<String>,
}

impl Default for CallPolicy {
    fn default() -> Self {
        CallPolicy {
            allowed: PURE_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl CallPolicy {
    pub fn with_extra(extra: impl IntoIterator<Item = String>) -> CallPolicy {
        let mut p = CallPolicy::default();
        p.allowed.extend(extra);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallSite {
    pub callee: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Blockers {
    pub io: Vec<CallSite>,
    pub unknown: Vec<CallSite>,
}

impl Blockers {
    pub fn is_empty(&self) -> bool {
        self.io.is_empty() && self.unknown.is_empty()
    }
}

/// I/O calls and calls outside the allowlist, in source order.
pub fn find_blockers(body: &Node, policy: &CallPolicy) -> Blockers {
    let mut b = Blockers::default();
    body.walk(&mut |n| {
        if let NodeKind::Call { callee } = &n.kind {
            let site = CallSite {
                callee: callee.clone(),
                span: n.span,
            };
            if IO_FUNCTIONS.contains(&callee.as_str()) {
                b.io.push(site);
            } else if !policy.allowed.contains(callee) {
                b.unknown.push(site);
            }
        }
    });
    b
}
