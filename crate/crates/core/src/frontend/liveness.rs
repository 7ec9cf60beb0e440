//! Backward liveness over the structured AST.
//!
//! Computes, for every `for` loop, the names whose value may still be read
//! after the loop exits. Scalar assignments kill; array element writes and
//! compound assignments do not.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Node, NodeKind};

pub type LiveSet = BTreeSet<String>;

/// Live-after sets keyed by the `for` loop's start byte.
pub fn live_after_loops(tu: &Node) -> BTreeMap<usize, LiveSet> {
    let globals: LiveSet = tu
        .children
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::VarDecl { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let mut out = BTreeMap::new();
    for item in &tu.children {
        if let NodeKind::FunctionDef { .. } = item.kind {
            let body = item.children.last().expect("function body");
            live_before(body, &globals, &mut out);
        }
    }
    out
}

fn reads(node: &Node, into: &mut LiveSet) {
    node.walk(&mut |n| {
        if let Some(name) = n.target_name() {
            into.insert(name.to_string());
        }
    });
}

fn target_reads(target: &Node, into: &mut LiveSet) {
    // an array element write reads its indices but not the array itself
    for idx in &target.children {
        reads(idx, into);
    }
}

fn live_before(node: &Node, after: &LiveSet, rec: &mut BTreeMap<usize, LiveSet>) -> LiveSet {
    match &node.kind {
        NodeKind::Block => node
            .children
            .iter()
            .rev()
            .fold(after.clone(), |live, s| live_before(s, &live, rec)),
        NodeKind::VarDecl { name, .. } => {
            let mut live = after.clone();
            live.remove(name);
            if let Some(init) = node.children.first() {
                reads(init, &mut live);
            }
            live
        }
        NodeKind::Assign => {
            let target = &node.children[0];
            let mut live = after.clone();
            match &target.kind {
                NodeKind::VarRef(name) => {
                    live.remove(name);
                }
                _ => target_reads(target, &mut live),
            }
            reads(&node.children[1], &mut live);
            live
        }
        NodeKind::CompoundAssign(_) => {
            let mut live = after.clone();
            for c in &node.children {
                reads(c, &mut live);
            }
            live
        }
        NodeKind::If => {
            let mut live = live_before(&node.children[1], after, rec);
            match node.children.get(2) {
                Some(e) => live.extend(live_before(e, after, rec)),
                None => live.extend(after.iter().cloned()),
            }
            reads(&node.children[0], &mut live);
            live
        }
        NodeKind::WhileLoop => {
            let mut head = after.clone();
            reads(&node.children[0], &mut head);
            loop {
                let mut next = after.clone();
                reads(&node.children[0], &mut next);
                next.extend(live_before(&node.children[1], &head, rec));
                if next == head {
                    break head;
                }
                head = next;
            }
        }
        NodeKind::ForLoop => {
            let [init, cond, step, body] = &node.children[..] else {
                unreachable!("ForLoop has four children")
            };
            rec.entry(node.span.start_byte)
                .or_default()
                .extend(after.iter().cloned());
            let mut head = after.clone();
            reads(cond, &mut head);
            loop {
                let mut next = after.clone();
                reads(cond, &mut next);
                let before_step = live_before(step, &head, rec);
                next.extend(live_before(body, &before_step, rec));
                if next == head {
                    break;
                }
                head = next;
            }
            live_before(init, &head, rec)
        }
        NodeKind::Return => {
            let mut live = LiveSet::new();
            if let Some(v) = node.children.first() {
                reads(v, &mut live);
            }
            live
        }
        _ => {
            // calls and other expression statements
            let mut live = after.clone();
            reads(node, &mut live);
            live
        }
    }
}
