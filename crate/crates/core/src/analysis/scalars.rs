//! Scalar privatization and reduction recognition.

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

use super::access::{body_locals, AccessMode, AccessRecord};
use crate::frontend::{AssignOp, BinOp, CanonicalLoop, Node, NodeKind};

/// Reduction operator. Subtraction is folded into `Add`, as OpenMP combines
/// `-` partials by addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ReductionOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "max")]
    Max,
    #[serde(rename = "min")]
    Min,
}

impl ReductionOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ReductionOp::Add => "+",
            ReductionOp::Mul => "*",
            ReductionOp::Max => "max",
            ReductionOp::Min => "min",
        }
    }

    /// Parse an OpenMP reduction identifier; `-` maps to `Add`.
    pub fn parse(s: &str) -> Option<ReductionOp> {
        Some(match s {
            "+" | "-" => ReductionOp::Add,
            "*" => ReductionOp::Mul,
            "max" => ReductionOp::Max,
            "min" => ReductionOp::Min,
            _ => return None,
        })
    }
}

impl fmt::Display for ReductionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "op")]
pub enum ScalarKind {
    Private,
    Reduction(ReductionOp),
    ReadOnlyShared,
    Induction,
    Carried,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalarClass {
    pub variable: String,
    #[serde(flatten)]
    pub kind: ScalarKind,
    /// Declared in the loop body, so already private.
    pub local: bool,
    pub detail: String,
}

/// Classify every scalar the loop body touches, sorted by name.
pub fn classify_scalars(lp: &CanonicalLoop, accesses: &[AccessRecord]) -> Vec<ScalarClass> {
    let locals = body_locals(&lp.body);
    let names: BTreeSet<&str> = accesses
        .iter()
        .filter(|a| !a.is_array)
        .map(|a| a.variable.as_str())
        .collect();
    names
        .into_iter()
        .map(|v| {
            let written = accesses.iter().any(|a| a.variable == v && a.mode == AccessMode::Write);
            let (kind, detail) = if v == lp.loop_var {
                (ScalarKind::Induction, "loop variable".to_string())
            } else if locals.contains(v) {
                (ScalarKind::Private, "declared in the loop body".to_string())
            } else if !written {
                (ScalarKind::ReadOnlyShared, "never written".to_string())
            } else if let Some(op) = reduction_op(&lp.body, v) {
                (ScalarKind::Reduction(op), format!("`{v} {op}= ...` accumulation"))
            } else if upward_exposed(&lp.body, v) {
                (
                    ScalarKind::Carried,
                    "read before being assigned in the iteration".to_string(),
                )
            } else if lp.live_after.contains(v) {
                (ScalarKind::Carried, "value is used after the loop".to_string())
            } else {
                (ScalarKind::Private, "assigned before every read".to_string())
            };
            ScalarClass {
                variable: v.to_string(),
                kind,
                local: locals.contains(v),
                detail,
            }
        })
        .collect()
}

fn mentions(node: &Node, v: &str) -> bool {
    node.any(&|n| n.target_name() == Some(v))
}

fn is_var(node: &Node, v: &str) -> bool {
    node.var_name() == Some(v)
}

/// Operator of `stmt` if it is a reduction update of `v`.
fn reduction_stmt(stmt: &Node, v: &str) -> Option<ReductionOp> {
    match &stmt.kind {
        NodeKind::CompoundAssign(op) if is_var(&stmt.children[0], v) => {
            let rhs_ok = stmt.children.get(1).is_none_or(|e| !mentions(e, v));
            if !rhs_ok {
                return None;
            }
            match op {
                AssignOp::Add | AssignOp::Sub | AssignOp::Inc | AssignOp::Dec => Some(ReductionOp::Add),
                AssignOp::Mul => Some(ReductionOp::Mul),
                AssignOp::Div => None,
            }
        }
        NodeKind::Assign if is_var(&stmt.children[0], v) => {
            let rhs = &stmt.children[1];
            let other = |a: &Node, b: &Node| -> Option<bool> {
                if is_var(a, v) && !mentions(b, v) {
                    Some(true)
                } else if is_var(b, v) && !mentions(a, v) {
                    Some(false)
                } else {
                    None
                }
            };
            match &rhs.kind {
                NodeKind::BinaryExpr(BinOp::Add) => other(&rhs.children[0], &rhs.children[1]).map(|_| ReductionOp::Add),
                NodeKind::BinaryExpr(BinOp::Mul) => other(&rhs.children[0], &rhs.children[1]).map(|_| ReductionOp::Mul),
                // only `v - e`; `e - v` is not a reduction
                NodeKind::BinaryExpr(BinOp::Sub) => other(&rhs.children[0], &rhs.children[1])
                    .filter(|left| *left)
                    .map(|_| ReductionOp::Add),
                NodeKind::Call { callee } if rhs.children.len() == 2 => {
                    let op = match callee.as_str() {
                        "max" | "fmax" => ReductionOp::Max,
                        "min" | "fmin" => ReductionOp::Min,
                        _ => return None,
                    };
                    other(&rhs.children[0], &rhs.children[1]).map(|_| op)
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Reduction operator for `v` if every statement touching it is an update
/// with the same operator and `v` is referenced nowhere else.
pub fn reduction_op(body: &Node, v: &str) -> Option<ReductionOp> {
    let mut ops = BTreeSet::new();
    let mut stray = false;
    scan_reduction(body, v, &mut ops, &mut stray);
    if stray || ops.len() != 1 {
        return None;
    }
    ops.into_iter().next()
}

fn scan_reduction(node: &Node, v: &str, ops: &mut BTreeSet<ReductionOp>, stray: &mut bool) {
    if let Some(op) = reduction_stmt(node, v) {
        ops.insert(op);
        return;
    }
    match &node.kind {
        NodeKind::VarRef(name) if name == v => *stray = true,
        NodeKind::VarDecl { name, .. } if name == v => *stray = true,
        _ => {
            for c in &node.children {
                scan_reduction(c, v, ops, stray);
            }
        }
    }
}

/// True when some read of `v` can observe a value from before the iteration.
pub fn upward_exposed(body: &Node, v: &str) -> bool {
    let mut defined = false;
    exposed_stmt(body, v, &mut defined)
}

fn exposed_expr(node: &Node, v: &str, defined: bool) -> bool {
    !defined && mentions(node, v)
}

fn exposed_stmt(node: &Node, v: &str, defined: &mut bool) -> bool {
    match &node.kind {
        NodeKind::Block => {
            for c in &node.children {
                if exposed_stmt(c, v, defined) {
                    return true;
                }
            }
            false
        }
        NodeKind::VarDecl { name, .. } => {
            if node.children.first().is_some_and(|e| exposed_expr(e, v, *defined)) {
                return true;
            }
            if name == v {
                *defined = true;
            }
            false
        }
        NodeKind::Assign => {
            let target = &node.children[0];
            if exposed_expr(&node.children[1], v, *defined) {
                return true;
            }
            if is_var(target, v) {
                *defined = true;
                false
            } else {
                target.children.iter().any(|i| exposed_expr(i, v, *defined))
            }
        }
        NodeKind::CompoundAssign(_) => node.children.iter().any(|c| exposed_expr(c, v, *defined)),
        NodeKind::If => {
            if exposed_expr(&node.children[0], v, *defined) {
                return true;
            }
            let mut d_then = *defined;
            if exposed_stmt(&node.children[1], v, &mut d_then) {
                return true;
            }
            let mut d_else = *defined;
            if let Some(e) = node.children.get(2) {
                if exposed_stmt(e, v, &mut d_else) {
                    return true;
                }
            }
            *defined = d_then && d_else;
            false
        }
        NodeKind::ForLoop => {
            let [init, cond, step, body] = &node.children[..] else {
                unreachable!()
            };
            if exposed_stmt(init, v, defined) || exposed_expr(cond, v, *defined) {
                return true;
            }
            let mut in_body = *defined;
            exposed_stmt(body, v, &mut in_body) || exposed_stmt(step, v, &mut in_body)
        }
        NodeKind::WhileLoop => {
            if exposed_expr(&node.children[0], v, *defined) {
                return true;
            }
            let mut in_body = *defined;
            exposed_stmt(&node.children[1], v, &mut in_body)
        }
        _ => exposed_expr(node, v, *defined),
    }
}
