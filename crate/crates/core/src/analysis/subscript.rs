//! Subscript classification.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::frontend::{BinOp, Node, NodeKind, UnOp};

/// Shape of one array subscript with respect to the loop variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SubscriptForm {
    /// `coeff * of_var + offset`, `coeff != 0`.
    Affine {
        coeff: i64,
        offset: i64,
        of_var: String,
    },
    Constant {
        value: i64,
    },
    /// Affine in the loop variable plus loop-invariant symbolic terms.
    ///
    /// Only produced by [`classify_subscript_with`]. `coeff` may be zero.
    Symbolic {
        coeff: i64,
        offset: i64,
        of_var: String,
        terms: BTreeMap<String, i64>,
    },
    NonAffine,
}

impl SubscriptForm {
    /// `(coeff, offset, terms)`, or `None` for `NonAffine`.
    pub fn linear_parts(&self) -> Option<(i64, i64, BTreeMap<String, i64>)> {
        match self {
            SubscriptForm::Affine { coeff, offset, .. } => Some((*coeff, *offset, BTreeMap::new())),
            SubscriptForm::Constant { value } => Some((0, *value, BTreeMap::new())),
            SubscriptForm::Symbolic {
                coeff, offset, terms, ..
            } => Some((*coeff, *offset, terms.clone())),
            SubscriptForm::NonAffine => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        !matches!(self, SubscriptForm::NonAffine)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Linear {
    coeff: i64,
    constant: i64,
    terms: BTreeMap<String, i64>,
}

impl Linear {
    fn constant(c: i64) -> Linear {
        Linear {
            constant: c,
            ..Linear::default()
        }
    }

    fn is_const(&self) -> bool {
        self.coeff == 0 && self.terms.is_empty()
    }

    fn add(self, other: Linear, sign: i64) -> Option<Linear> {
        let mut terms = self.terms;
        for (k, v) in other.terms {
            let e = terms.entry(k).or_insert(0);
            *e = e.checked_add(v.checked_mul(sign)?)?;
        }
        terms.retain(|_, v| *v != 0);
        Some(Linear {
            coeff: self.coeff.checked_add(other.coeff.checked_mul(sign)?)?,
            constant: self.constant.checked_add(other.constant.checked_mul(sign)?)?,
            terms,
        })
    }

    fn scale(self, k: i64) -> Option<Linear> {
        let mut terms = BTreeMap::new();
        for (n, v) in self.terms {
            let s = v.checked_mul(k)?;
            if s != 0 {
                terms.insert(n, s);
            }
        }
        Some(Linear {
            coeff: self.coeff.checked_mul(k)?,
            constant: self.constant.checked_mul(k)?,
            terms,
        })
    }
}

fn linearize(expr: &Node, var: &str, invariant: &dyn Fn(&str) -> bool) -> Option<Linear> {
    match &expr.kind {
        NodeKind::IntLiteral(v) => Some(Linear::constant(*v)),
        NodeKind::VarRef(name) if name == var => Some(Linear {
            coeff: 1,
            ..Linear::default()
        }),
        NodeKind::VarRef(name) if invariant(name) => {
            let mut terms = BTreeMap::new();
            terms.insert(name.clone(), 1);
            Some(Linear {
                terms,
                ..Linear::default()
            })
        }
        NodeKind::UnaryExpr(UnOp::Neg) => linearize(&expr.children[0], var, invariant)?.scale(-1),
        NodeKind::BinaryExpr(op) => {
            let a = linearize(&expr.children[0], var, invariant)?;
            let b = linearize(&expr.children[1], var, invariant)?;
            match op {
                BinOp::Add => a.add(b, 1),
                BinOp::Sub => a.add(b, -1),
                BinOp::Mul if a.is_const() => b.scale(a.constant),
                BinOp::Mul if b.is_const() => a.scale(b.constant),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Classify `expr` against `loop_var`; any other variable makes it non-affine.
pub fn classify_subscript(expr: &Node, loop_var: &str) -> SubscriptForm {
    classify_subscript_with(expr, loop_var, &|_| false)
}

/// Like [`classify_subscript`], treating names accepted by `invariant` as
/// symbolic loop-invariant terms.
pub fn classify_subscript_with(expr: &Node, loop_var: &str, invariant: &dyn Fn(&str) -> bool) -> SubscriptForm {
    match linearize(expr, loop_var, invariant) {
        None => SubscriptForm::NonAffine,
        Some(l) if !l.terms.is_empty() => SubscriptForm::Symbolic {
            coeff: l.coeff,
            offset: l.constant,
            of_var: loop_var.to_string(),
            terms: l.terms,
        },
        Some(l) if l.coeff == 0 => SubscriptForm::Constant { value: l.constant },
        Some(l) => SubscriptForm::Affine {
            coeff: l.coeff,
            offset: l.constant,
            of_var: loop_var.to_string(),
        },
    }
}
