//! Memory access collection over a loop body.

use serde::Serialize;
use std::collections::BTreeSet;

use super::subscript::{classify_subscript_with, SubscriptForm};
use crate::frontend::loops::written_names;
use crate::frontend::unparse_expr;
use crate::frontend::{CanonicalLoop, Node, NodeKind, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AccessMode {
    Read,
    Write,
}

#[derive(Debug, Clone, Serialize)]
pub struct AccessRecord {
    pub variable: String,
    pub mode: AccessMode,
    /// One entry per dimension; empty for scalars.
    pub subscripts: Vec<SubscriptForm>,
    /// Index expressions as written, parallel to `subscripts`.
    pub index_text: Vec<String>,
    #[serde(skip)]
    pub index_exprs: Vec<Node>,
    pub stmt_span: SourceSpan,
    /// Evaluation order within one iteration.
    pub order_index: usize,
    pub is_array: bool,
    /// Declared inside the loop body.
    pub body_local: bool,
}

struct Collector<'a> {
    lp: &'a CanonicalLoop,
    written: BTreeSet<String>,
    locals: BTreeSet<String>,
    out: Vec<AccessRecord>,
    stmt: SourceSpan,
}

/// Names declared anywhere inside `body`.
pub fn body_locals(body: &Node) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    body.walk(&mut |n| {
        if let NodeKind::VarDecl { name, .. } = &n.kind {
            out.insert(name.clone());
        }
    });
    out
}

/// Every read and write in the loop body, in evaluation order.
///
/// Right-hand sides are evaluated before the target is written; inner loop
/// headers contribute in `init, cond, body, step` order.
pub fn collect_accesses(lp: &CanonicalLoop) -> Vec<AccessRecord> {
    let mut c = Collector {
        lp,
        written: written_names(&lp.body).into_iter().collect(),
        locals: body_locals(&lp.body),
        out: Vec::new(),
        stmt: lp.body.span,
    };
    c.stmt_node(&lp.body);
    c.out
}

impl Collector<'_> {
    fn is_invariant(&self, name: &str) -> bool {
        name != self.lp.loop_var && !self.written.contains(name) && !self.lp.arrays.contains_key(name)
    }

    fn record(&mut self, target: &Node, mode: AccessMode) {
        let (variable, is_array, exprs) = match &target.kind {
            NodeKind::ArrayAccess { name } => (name.clone(), true, target.children.clone()),
            NodeKind::VarRef(name) => (name.clone(), self.lp.arrays.contains_key(name), Vec::new()),
            _ => return,
        };
        let subscripts = if is_array && exprs.is_empty() {
            // whole array passed by name: any element
            vec![SubscriptForm::NonAffine; self.lp.arrays[&variable]]
        } else {
            exprs
                .iter()
                .map(|e| classify_subscript_with(e, &self.lp.loop_var, &|n| self.is_invariant(n)))
                .collect()
        };
        let index_text = exprs.iter().map(unparse_expr).collect();
        self.out.push(AccessRecord {
            body_local: self.locals.contains(&variable),
            variable,
            mode,
            subscripts,
            index_text,
            index_exprs: exprs,
            stmt_span: self.stmt,
            order_index: self.out.len(),
            is_array,
        });
    }

    fn expr(&mut self, node: &Node) {
        match &node.kind {
            NodeKind::VarRef(_) => self.record(node, AccessMode::Read),
            NodeKind::ArrayAccess { .. } => {
                for idx in &node.children {
                    self.expr(idx);
                }
                self.record(node, AccessMode::Read);
            }
            _ => {
                for c in &node.children {
                    self.expr(c);
                }
            }
        }
    }

    fn target_indices(&mut self, target: &Node) {
        if let NodeKind::ArrayAccess { .. } = target.kind {
            for idx in &target.children {
                self.expr(idx);
            }
        }
    }

    fn stmt_node(&mut self, node: &Node) {
        let saved = self.stmt;
        if node.kind.is_statement() && node.kind != NodeKind::Block {
            self.stmt = node.span;
        }
        match &node.kind {
            NodeKind::Block => {
                for c in &node.children {
                    self.stmt_node(c);
                }
            }
            NodeKind::VarDecl { name, .. } => {
                if let Some(init) = node.children.first() {
                    self.expr(init);
                    let target = Node::leaf(NodeKind::VarRef(name.clone()), node.span);
                    self.record(&target, AccessMode::Write);
                }
            }
            NodeKind::Assign => {
                self.expr(&node.children[1]);
                self.target_indices(&node.children[0]);
                self.record(&node.children[0], AccessMode::Write);
            }
            NodeKind::CompoundAssign(_) => {
                let target = &node.children[0];
                self.target_indices(target);
                // read of the old value without re-reading the indices
                self.record(target, AccessMode::Read);
                if let Some(v) = node.children.get(1) {
                    self.expr(v);
                }
                self.record(target, AccessMode::Write);
            }
            NodeKind::If => {
                self.expr(&node.children[0]);
                for c in &node.children[1..] {
                    self.stmt_node(c);
                }
            }
            NodeKind::ForLoop => {
                let [init, cond, step, body] = &node.children[..] else {
                    unreachable!()
                };
                self.stmt_node(init);
                self.expr(cond);
                self.stmt_node(body);
                self.stmt_node(step);
            }
            NodeKind::WhileLoop => {
                self.expr(&node.children[0]);
                self.stmt_node(&node.children[1]);
            }
            _ => self.expr(node),
        }
        self.stmt = saved;
    }
}
