//! Canonical `for` loop discovery.

use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::{AssignOp, BinOp, CType, Node, NodeKind, UnOp};
use super::liveness::live_after_loops;
use super::span::SourceSpan;
use super::unparse::unparse_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparison {
    fn from_binop(op: BinOp) -> Option<Comparison> {
        Some(match op {
            BinOp::Lt => Comparison::Lt,
            BinOp::Le => Comparison::Le,
            BinOp::Gt => Comparison::Gt,
            BinOp::Ge => Comparison::Ge,
            _ => return None,
        })
    }

    /// `e REL i` rewritten as `i REL' e`.
    fn flipped(self) -> Comparison {
        match self {
            Comparison::Lt => Comparison::Gt,
            Comparison::Le => Comparison::Ge,
            Comparison::Gt => Comparison::Lt,
            Comparison::Ge => Comparison::Le,
        }
    }

    pub fn is_ascending(self) -> bool {
        matches!(self, Comparison::Lt | Comparison::Le)
    }
}

fn expr_text<S: Serializer>(node: &Node, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&unparse_expr(node))
}

/// A `for` loop in OpenMP canonical form: `v = lower; v REL upper; v += stride`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalLoop {
    /// Position in the `loops` list of the scan that produced it.
    pub id: usize,
    pub function: String,
    pub loop_var: String,
    /// True for `for (int i = ...)`; the variable is then local to the loop.
    pub var_declared_in_init: bool,
    #[serde(serialize_with = "expr_text")]
    pub lower: Node,
    #[serde(serialize_with = "expr_text")]
    pub upper: Node,
    pub comparison: Comparison,
    pub stride: i64,
    #[serde(skip)]
    pub body: Node,
    pub span: SourceSpan,
    /// Number of loops (of any kind) enclosing this one.
    pub depth: usize,
    /// Enclosing canonical loop, by id.
    pub parent: Option<usize>,
    /// 1 for a loop without inner loops.
    pub nest_depth: usize,
    /// Arrays visible in the enclosing function, with their rank.
    #[serde(skip)]
    pub arrays: BTreeMap<String, usize>,
    /// Names whose value may be read after the loop exits.
    #[serde(skip)]
    pub live_after: BTreeSet<String>,
}

/// Concrete iteration space in execution order: `start + stride * k`, `k in 0..trip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IterSpace {
    pub start: i64,
    pub stride: i64,
    pub trip: u64,
}

impl IterSpace {
    /// Ascending unit-stride domain `[lower, upper)`.
    pub fn half_open(lower: i64, upper: i64) -> IterSpace {
        IterSpace {
            start: lower,
            stride: 1,
            trip: (upper - lower).max(0) as u64,
        }
    }

    pub fn value(&self, k: u64) -> i64 {
        self.start + self.stride * k as i64
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.trip).map(|k| self.value(k))
    }
}

fn trip_count(start: i64, bound: i64, cmp: Comparison, stride: i64) -> u64 {
    let (span, step) = match cmp {
        Comparison::Lt => (bound - start, stride),
        Comparison::Le => (bound + 1 - start, stride),
        Comparison::Gt => (start - bound, -stride),
        Comparison::Ge => (start - (bound - 1), -stride),
    };
    if span <= 0 || step <= 0 {
        0
    } else {
        ((span + step - 1) / step) as u64
    }
}

impl CanonicalLoop {
    /// Iteration space when both bounds fold to integer constants.
    pub fn const_space(&self) -> Option<IterSpace> {
        self.space_with(&|_| None)
    }

    /// Iteration space with free variables bound by `env`.
    pub fn space_with(&self, env: &dyn Fn(&str) -> Option<i64>) -> Option<IterSpace> {
        let start = eval_int(&self.lower, env)?;
        let bound = eval_int(&self.upper, env)?;
        Some(IterSpace {
            start,
            stride: self.stride,
            trip: trip_count(start, bound, self.comparison, self.stride),
        })
    }

    pub fn start_const(&self) -> Option<i64> {
        eval_int(&self.lower, &|_| None)
    }
}

/// Integer evaluation of an expression; `None` for anything non-integral or unbound.
pub fn eval_int(node: &Node, env: &dyn Fn(&str) -> Option<i64>) -> Option<i64> {
    match &node.kind {
        NodeKind::IntLiteral(v) => Some(*v),
        NodeKind::VarRef(name) => env(name),
        NodeKind::UnaryExpr(UnOp::Neg) => eval_int(&node.children[0], env)?.checked_neg(),
        NodeKind::BinaryExpr(op) => {
            let a = eval_int(&node.children[0], env)?;
            let b = eval_int(&node.children[1], env)?;
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SkipReason {
    WhileLoop,
    NonCanonicalInit,
    NonCanonicalCondition,
    NonCanonicalStep,
    NonConstantStride,
    InconsistentStride,
    LoopVarReassigned,
    VaryingBound,
    EarlyExit,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkipRecord {
    pub function: String,
    pub span: SourceSpan,
    pub line: u32,
    pub reason: SkipReason,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LoopScan {
    pub loops: Vec<CanonicalLoop>,
    pub skipped: Vec<SkipRecord>,
}

struct Scanner {
    scan: LoopScan,
    function: String,
    types: HashMap<String, CType>,
    globals: HashMap<String, CType>,
    arrays: BTreeMap<String, usize>,
    live: BTreeMap<usize, BTreeSet<String>>,
}

/// Find every canonical `for` loop in document (pre-)order, outermost first.
pub fn locate_loops(tu: &Node) -> LoopScan {
    let mut globals = HashMap::new();
    let mut global_arrays = BTreeMap::new();
    for item in &tu.children {
        if let NodeKind::VarDecl { ty, name, dims } = &item.kind {
            globals.insert(name.clone(), *ty);
            if !dims.is_empty() {
                global_arrays.insert(name.clone(), dims.len());
            }
        }
    }
    let mut sc = Scanner {
        scan: LoopScan::default(),
        function: String::new(),
        types: HashMap::new(),
        globals,
        arrays: BTreeMap::new(),
        live: live_after_loops(tu),
    };
    for item in &tu.children {
        if let NodeKind::FunctionDef { name, .. } = &item.kind {
            sc.function = name.clone();
            sc.types = sc.globals.clone();
            sc.arrays = global_arrays.clone();
            item.walk(&mut |n| {
                if let NodeKind::VarDecl { ty, name, dims } = &n.kind {
                    sc.types.entry(name.clone()).or_insert(*ty);
                    if !dims.is_empty() {
                        sc.arrays.insert(name.clone(), dims.len());
                    } else {
                        sc.arrays.remove(name);
                    }
                }
            });
            sc.visit(item, 0, None);
        }
    }
    sc.scan
}

fn nest_depth(node: &Node) -> usize {
    1 + inner_only(node)
}

fn inner_only(node: &Node) -> usize {
    node.children
        .iter()
        .map(|c| match c.kind {
            NodeKind::ForLoop | NodeKind::WhileLoop => nest_depth(c),
            _ => inner_only(c),
        })
        .max()
        .unwrap_or(0)
}

/// Names assigned anywhere under `node` (assignment targets and declarations).
pub fn written_names(node: &Node) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |n: &str| {
        if !out.iter().any(|x| x == n) {
            out.push(n.to_string());
        }
    };
    node.walk(&mut |n| match &n.kind {
        NodeKind::Assign | NodeKind::CompoundAssign(_) => {
            if let Some(t) = n.children[0].target_name() {
                push(t);
            }
        }
        NodeKind::VarDecl { name, .. } => push(name),
        _ => {}
    });
    out
}

impl Scanner {
    fn visit(&mut self, node: &Node, depth: usize, parent: Option<usize>) {
        match node.kind {
            NodeKind::ForLoop => {
                let id = self.check_for(node, depth, parent);
                let inner_parent = id.or(parent);
                for c in &node.children {
                    self.visit(c, depth + 1, inner_parent);
                }
            }
            NodeKind::WhileLoop => {
                self.skip(node, SkipReason::WhileLoop, "while loops have no canonical form".into());
                for c in &node.children {
                    self.visit(c, depth + 1, parent);
                }
            }
            _ => {
                for c in &node.children {
                    self.visit(c, depth, parent);
                }
            }
        }
    }

    fn skip(&mut self, node: &Node, reason: SkipReason, detail: String) {
        self.scan.skipped.push(SkipRecord {
            function: self.function.clone(),
            span: node.span,
            line: node.span.line,
            reason,
            detail,
        });
    }

    fn check_for(&mut self, node: &Node, depth: usize, parent: Option<usize>) -> Option<usize> {
        match self.canonical(node) {
            Ok((var, declared, lower, upper, comparison, stride)) => {
                let id = self.scan.loops.len();
                self.scan.loops.push(CanonicalLoop {
                    id,
                    function: self.function.clone(),
                    loop_var: var,
                    var_declared_in_init: declared,
                    lower,
                    upper,
                    comparison,
                    stride,
                    body: node.children[3].clone(),
                    span: node.span,
                    depth,
                    parent,
                    nest_depth: nest_depth(node),
                    arrays: self.arrays.clone(),
                    live_after: self.live.get(&node.span.start_byte).cloned().unwrap_or_default(),
                });
                Some(id)
            }
            Err((reason, detail)) => {
                self.skip(node, reason, detail);
                None
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn canonical(&self, node: &Node) -> Result<(String, bool, Node, Node, Comparison, i64), (SkipReason, String)> {
        let [init, cond, step, body] = &node.children[..] else {
            unreachable!("ForLoop always has four children");
        };

        // init: `v = e` or `int v = e`
        let (var, declared, lower) = match &init.kind {
            NodeKind::Assign => match init.children[0].var_name() {
                Some(v) => (v.to_string(), false, init.children[1].clone()),
                None => {
                    return Err((
                        SkipReason::NonCanonicalInit,
                        "initializer must assign a scalar loop variable".into(),
                    ))
                }
            },
            NodeKind::VarDecl { name, dims, .. } if dims.is_empty() => (name.clone(), true, init.children[0].clone()),
            _ => return Err((SkipReason::NonCanonicalInit, "initializer is not `var = expr`".into())),
        };
        if matches!(self.types.get(&var), Some(CType::Float | CType::Double)) {
            return Err((
                SkipReason::NonCanonicalInit,
                format!("loop variable `{var}` is not an integer"),
            ));
        }
        if lower.referenced_names().contains(&var) {
            return Err((
                SkipReason::NonCanonicalInit,
                "lower bound refers to the loop variable".into(),
            ));
        }

        // condition: `v REL e` or `e REL v`
        let (comparison, upper) = match &cond.kind {
            NodeKind::BinaryExpr(op) if op.is_comparison() => {
                let cmp = Comparison::from_binop(*op).expect("checked comparison");
                let (l, r) = (&cond.children[0], &cond.children[1]);
                if l.var_name() == Some(var.as_str()) {
                    (cmp, r.clone())
                } else if r.var_name() == Some(var.as_str()) {
                    (cmp.flipped(), l.clone())
                } else {
                    return Err((
                        SkipReason::NonCanonicalCondition,
                        format!("condition does not compare `{var}` against a bound"),
                    ));
                }
            }
            _ => {
                return Err((
                    SkipReason::NonCanonicalCondition,
                    "condition is not a relational comparison".into(),
                ))
            }
        };
        if upper.referenced_names().contains(&var) {
            return Err((
                SkipReason::NonCanonicalCondition,
                "bound refers to the loop variable".into(),
            ));
        }

        let stride = step_stride(step, &var)?;
        if stride == 0 {
            return Err((SkipReason::NonConstantStride, "zero stride".into()));
        }
        if comparison.is_ascending() != (stride > 0) {
            return Err((
                SkipReason::InconsistentStride,
                format!("stride {stride} runs away from the bound"),
            ));
        }

        let written = written_names(body);
        if written.contains(&var) {
            return Err((
                SkipReason::LoopVarReassigned,
                format!("loop variable `{var}` is assigned in the body"),
            ));
        }
        let bound_vars: Vec<String> = lower
            .referenced_names()
            .into_iter()
            .chain(upper.referenced_names())
            .collect();
        if let Some(v) = bound_vars.iter().find(|v| written.contains(v)) {
            return Err((
                SkipReason::VaryingBound,
                format!("bound variable `{v}` is modified in the body"),
            ));
        }
        if body.any(&|n| n.kind == NodeKind::Return) {
            return Err((SkipReason::EarlyExit, "body contains `return`".into()));
        }
        Ok((var, declared, lower, upper, comparison, stride))
    }
}

fn literal_int(node: &Node) -> Option<i64> {
    match &node.kind {
        NodeKind::IntLiteral(v) => Some(*v),
        NodeKind::UnaryExpr(UnOp::Neg) => node.children[0].int_value().map(|v| -v),
        _ => None,
    }
}

fn step_stride(step: &Node, var: &str) -> Result<i64, (SkipReason, String)> {
    let target = step.children.first().and_then(Node::var_name);
    if target != Some(var) {
        return Err((SkipReason::NonCanonicalStep, format!("step does not update `{var}`")));
    }
    let non_const = || {
        (
            SkipReason::NonConstantStride,
            "step is not an increment by an integer literal".to_string(),
        )
    };
    match &step.kind {
        NodeKind::CompoundAssign(AssignOp::Inc) => Ok(1),
        NodeKind::CompoundAssign(AssignOp::Dec) => Ok(-1),
        NodeKind::CompoundAssign(AssignOp::Add) => literal_int(&step.children[1]).ok_or_else(non_const),
        NodeKind::CompoundAssign(AssignOp::Sub) => literal_int(&step.children[1]).map(|c| -c).ok_or_else(non_const),
        NodeKind::Assign => {
            let rhs = &step.children[1];
            match &rhs.kind {
                NodeKind::BinaryExpr(BinOp::Add) => {
                    let (a, b) = (&rhs.children[0], &rhs.children[1]);
                    if a.var_name() == Some(var) {
                        literal_int(b).ok_or_else(non_const)
                    } else if b.var_name() == Some(var) {
                        literal_int(a).ok_or_else(non_const)
                    } else {
                        Err(non_const())
                    }
                }
                NodeKind::BinaryExpr(BinOp::Sub) if rhs.children[0].var_name() == Some(var) => {
                    literal_int(&rhs.children[1]).map(|c| -c).ok_or_else(non_const)
                }
                _ => Err(non_const()),
            }
        }
        _ => Err(non_const()),
    }
}
