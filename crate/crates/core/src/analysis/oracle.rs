//! Exhaustive dependence reference for small concrete domains.

use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

use super::access::{AccessMode, AccessRecord};
use super::dependence::{DepKind, DependenceResult};
use crate::frontend::{BinOp, IterSpace, Node, NodeKind, UnOp};

/// Largest trip count the oracle will enumerate.
pub const MAX_ORACLE_TRIP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("domain of {0} iterations exceeds the oracle limit")]
    DomainTooLarge(u64),
    #[error("accesses refer to different variables `{0}` and `{1}`")]
    MismatchedArray(String, String),
    #[error("neither access writes")]
    NoWrite,
    #[error("cannot evaluate index `{0}`")]
    Unevaluable(String),
}

/// Values of free names used by index expressions.
#[derive(Debug, Clone, Default)]
pub struct OracleEnv {
    pub scalars: HashMap<String, i64>,
    /// One-dimensional integer arrays such as index maps.
    pub arrays: HashMap<String, Vec<i64>>,
}

fn eval(node: &Node, var: &str, i: i64, env: &OracleEnv) -> Option<i64> {
    match &node.kind {
        NodeKind::IntLiteral(v) => Some(*v),
        NodeKind::VarRef(n) if n == var => Some(i),
        NodeKind::VarRef(n) => env.scalars.get(n).copied(),
        NodeKind::ArrayAccess { name } if node.children.len() == 1 => {
            let idx = eval(&node.children[0], var, i, env)?;
            env.arrays.get(name)?.get(usize::try_from(idx).ok()?).copied()
        }
        NodeKind::UnaryExpr(UnOp::Neg) => eval(&node.children[0], var, i, env)?.checked_neg(),
        NodeKind::BinaryExpr(op) => {
            let a = eval(&node.children[0], var, i, env)?;
            let b = eval(&node.children[1], var, i, env)?;
            match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div => a.checked_div(b),
                BinOp::Rem => a.checked_rem(b),
                _ => None,
            }
        }
        _ => None,
    }
}

fn element(acc: &AccessRecord, var: &str, i: i64, env: &OracleEnv) -> Result<Vec<i64>, OracleError> {
    acc.index_exprs
        .iter()
        .map(|e| eval(e, var, i, env).ok_or_else(|| OracleError::Unevaluable(crate::frontend::unparse_expr(e))))
        .collect()
}

/// Enumerate every iteration pair in `space` and report collisions.
pub fn brute_force_dependence(
    w: &AccessRecord,
    r: &AccessRecord,
    loop_var: &str,
    space: IterSpace,
) -> Result<DependenceResult, OracleError> {
    brute_force_dependence_with(w, r, loop_var, space, &OracleEnv::default())
}

/// [`brute_force_dependence`] with free names bound by `env`.
pub fn brute_force_dependence_with(
    w: &AccessRecord,
    r: &AccessRecord,
    loop_var: &str,
    space: IterSpace,
    env: &OracleEnv,
) -> Result<DependenceResult, OracleError> {
    if space.trip > MAX_ORACLE_TRIP {
        return Err(OracleError::DomainTooLarge(space.trip));
    }
    if w.variable != r.variable {
        return Err(OracleError::MismatchedArray(w.variable.clone(), r.variable.clone()));
    }
    let (w, r) = match (w.mode, r.mode) {
        (AccessMode::Read, AccessMode::Read) => return Err(OracleError::NoWrite),
        (AccessMode::Read, AccessMode::Write) => (r, w),
        _ => (w, r),
    };
    let self_pair = w.order_index == r.order_index;

    let we: Vec<Vec<i64>> = space
        .values()
        .map(|i| element(w, loop_var, i, env))
        .collect::<Result<_, _>>()?;
    let re: Vec<Vec<i64>> = space
        .values()
        .map(|i| element(r, loop_var, i, env))
        .collect::<Result<_, _>>()?;

    let mut flow = false;
    let mut anti = false;
    let mut carried = false;
    let mut diffs = BTreeSet::new();
    for (k1, e1) in we.iter().enumerate() {
        for (k2, e2) in re.iter().enumerate() {
            if e1 != e2 || (self_pair && k1 == k2) {
                continue;
            }
            let d = k2 as i64 - k1 as i64;
            if d > 0 || (d == 0 && w.order_index < r.order_index) {
                flow = true;
            }
            if d < 0 || (d == 0 && r.order_index < w.order_index) {
                anti = true;
            }
            carried |= d != 0;
            diffs.insert(d * space.stride);
        }
    }
    if diffs.is_empty() || (!self_pair && !flow && !anti) {
        return Ok(DependenceResult::none());
    }
    let kind = if r.mode == AccessMode::Write {
        DepKind::Output
    } else if flow {
        DepKind::Flow
    } else {
        DepKind::Anti
    };
    Ok(DependenceResult {
        exists: true,
        kind: Some(kind),
        carried,
        distance: (diffs.len() == 1).then(|| *diffs.iter().next().unwrap()),
        conservative: false,
    })
}
