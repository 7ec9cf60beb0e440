//! Loop tagging and example ranking.

use std::collections::BTreeSet;
use thiserror::Error;

use super::corpus::{IclCorpus, IclExample, PatternTag, TagSet};
use crate::analysis::{AccessMode, LoopAnalysis, ScalarKind, SubscriptForm};
use crate::frontend::{Node, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("the example corpus is empty")]
    EmptyCorpus,
}

/// Variables of `for` loops nested in `body`.
fn inner_loop_vars(body: &Node) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    body.walk(&mut |n| {
        if n.kind == NodeKind::ForLoop {
            if let Some(v) = n.children[0].target_name().or(match &n.children[0].kind {
                NodeKind::VarDecl { name, .. } => Some(name.as_str()),
                _ => None,
            }) {
                out.insert(v.to_string());
            }
        }
    });
    out
}

fn nonzero_offset(f: &SubscriptForm) -> bool {
    match f {
        SubscriptForm::Affine { offset, .. } | SubscriptForm::Symbolic { offset, .. } => *offset != 0,
        _ => false,
    }
}

/// Pattern tags describing a parallelizable loop.
pub fn tag_loop(a: &LoopAnalysis) -> TagSet {
    let mut tags = TagSet::new();
    let inner = inner_loop_vars(&a.lp.body);
    for s in &a.scalar_classes {
        match s.kind {
            ScalarKind::Reduction(_) => {
                tags.insert(PatternTag::Reduction);
            }
            ScalarKind::Private if !inner.contains(&s.variable) => {
                tags.insert(PatternTag::PrivateTemp);
            }
            _ => {}
        }
    }
    if a.accesses.iter().any(|x| x.is_array && x.subscripts.len() >= 2) {
        tags.insert(PatternTag::TwodArray);
    }
    if a.lp.nest_depth > 1 {
        tags.insert(PatternTag::Nested);
    }
    if a.lp.body.any(&|n| n.kind == NodeKind::If) {
        tags.insert(PatternTag::Branchy);
    }
    let written: BTreeSet<&str> = a
        .accesses
        .iter()
        .filter(|x| x.mode == AccessMode::Write)
        .map(|x| x.variable.as_str())
        .collect();
    let stencil = a.accesses.iter().any(|x| {
        x.is_array
            && x.mode == AccessMode::Read
            && !written.contains(x.variable.as_str())
            && x.subscripts.iter().any(nonzero_offset)
    });
    if stencil {
        tags.insert(PatternTag::StencilRead);
    }
    if tags.is_empty() {
        tags.insert(PatternTag::Map);
    }
    tags
}

/// Top `k` examples by tag overlap, ties broken by id.
///
/// When some example covers every tag in `tags`, at least one such example
/// is in the result (for `k >= 1`).
pub fn select_examples<'c>(tags: &TagSet, corpus: &'c IclCorpus, k: usize) -> Result<Vec<&'c IclExample>, SelectError> {
    if corpus.is_empty() {
        return Err(SelectError::EmptyCorpus);
    }
    let mut ranked: Vec<(usize, &IclExample)> = corpus
        .examples
        .iter()
        .map(|e| (e.pattern_tags.intersection(tags).count(), e))
        .collect();
    ranked.sort_by(|(sa, a), (sb, b)| sb.cmp(sa).then_with(|| a.id.cmp(&b.id)));
    let mut out: Vec<&IclExample> = ranked.iter().take(k).map(|(_, e)| *e).collect();
    let superset = |e: &IclExample| tags.is_subset(&e.pattern_tags);
    if k >= 1 && !out.iter().any(|e| superset(e)) {
        if let Some((_, e)) = ranked.iter().find(|(_, e)| superset(e)) {
            out.pop();
            out.push(e);
        }
    }
    Ok(out)
}
