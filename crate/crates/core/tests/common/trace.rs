//! A small interpreter that runs one loop on concrete data and records
//! every array element it touches, tagged with the iteration.

use ompar::frontend::{AssignOp, BinOp, CanonicalLoop, Comparison, Node, NodeKind, UnOp};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Val {
    I(i64),
    F(f64),
}

impl Val {
    fn f(self) -> f64 {
        match self {
            Val::I(v) => v as f64,
            Val::F(v) => v,
        }
    }

    fn i(self) -> i64 {
        match self {
            Val::I(v) => v,
            Val::F(v) => v as i64,
        }
    }

    fn truthy(self) -> bool {
        self.f() != 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub iter: u64,
    pub array: String,
    pub index: Vec<i64>,
    pub write: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Carried {
    Flow,
    Anti,
    Output,
}

/// Scalars never assigned read as this; loop bounds like `n` pick it up.
pub const DEFAULT_SCALAR: i64 = 16;
const STEP_LIMIT: u64 = 1_000_000;

#[derive(Default)]
pub struct Machine {
    scalars: HashMap<String, Val>,
    memory: HashMap<(String, Vec<i64>), Val>,
    pub events: Vec<Event>,
    pub io: bool,
    iter: Option<u64>,
    steps: u64,
    returned: bool,
}

/// Deterministic initial contents; small values so index arrays collide.
fn initial(name: &str, index: &[i64]) -> Val {
    let h = index
        .iter()
        .fold(name.len() as i64, |h, x| h.wrapping_mul(31).wrapping_add(*x));
    Val::I(h.rem_euclid(5))
}

impl Machine {
    pub fn set_scalar(&mut self, name: &str, v: Val) {
        self.scalars.insert(name.to_string(), v);
    }

    fn tick(&mut self) {
        self.steps += 1;
        assert!(self.steps < STEP_LIMIT, "trace step limit exceeded");
    }

    fn record(&mut self, array: &str, index: &[i64], write: bool) {
        if let Some(iter) = self.iter {
            self.events.push(Event {
                iter,
                array: array.to_string(),
                index: index.to_vec(),
                write,
            });
        }
    }

    fn indices(&mut self, n: &Node) -> Vec<i64> {
        n.children.iter().map(|c| self.eval(c).i()).collect()
    }

    fn load(&mut self, target: &Node) -> Val {
        match &target.kind {
            NodeKind::VarRef(v) => *self.scalars.get(v).unwrap_or(&Val::I(DEFAULT_SCALAR)),
            NodeKind::ArrayAccess { name } => {
                let idx = self.indices(target);
                self.record(name, &idx, false);
                *self
                    .memory
                    .get(&(name.clone(), idx.clone()))
                    .unwrap_or(&initial(name, &idx))
            }
            other => panic!("not an lvalue: {other:?}"),
        }
    }

    fn store_at(&mut self, target: &Node, idx: Option<Vec<i64>>, v: Val) {
        match &target.kind {
            NodeKind::VarRef(n) => {
                self.scalars.insert(n.clone(), v);
            }
            NodeKind::ArrayAccess { name } => {
                let idx = idx.unwrap_or_else(|| self.indices(target));
                self.record(name, &idx, true);
                self.memory.insert((name.clone(), idx), v);
            }
            other => panic!("not an lvalue: {other:?}"),
        }
    }

    pub fn eval(&mut self, n: &Node) -> Val {
        self.tick();
        match &n.kind {
            NodeKind::IntLiteral(v) => Val::I(*v),
            NodeKind::FloatLiteral(t) => Val::F(t.trim_end_matches(['f', 'F']).parse().unwrap_or(0.0)),
            NodeKind::StringLiteral(_) => Val::I(0),
            NodeKind::VarRef(_) | NodeKind::ArrayAccess { .. } => self.load(n),
            NodeKind::UnaryExpr(UnOp::Neg) => match self.eval(&n.children[0]) {
                Val::I(v) => Val::I(v.wrapping_neg()),
                Val::F(v) => Val::F(-v),
            },
            NodeKind::UnaryExpr(UnOp::Not) => Val::I(!self.eval(&n.children[0]).truthy() as i64),
            NodeKind::BinaryExpr(BinOp::And) => {
                let l = self.eval(&n.children[0]).truthy();
                Val::I((l && self.eval(&n.children[1]).truthy()) as i64)
            }
            NodeKind::BinaryExpr(BinOp::Or) => {
                let l = self.eval(&n.children[0]).truthy();
                Val::I((l || self.eval(&n.children[1]).truthy()) as i64)
            }
            NodeKind::BinaryExpr(op) => {
                let a = self.eval(&n.children[0]);
                let b = self.eval(&n.children[1]);
                binary(*op, a, b)
            }
            NodeKind::Call { callee } => {
                let args: Vec<Val> = n.children.iter().map(|c| self.eval(c)).collect();
                self.call(callee, &args)
            }
            NodeKind::Assign | NodeKind::CompoundAssign(_) => {
                self.exec(n);
                Val::I(0)
            }
            other => panic!("cannot evaluate {other:?}"),
        }
    }

    fn call(&mut self, callee: &str, args: &[Val]) -> Val {
        let x = args.first().map_or(0.0, |v| v.f());
        let y = args.get(1).map_or(0.0, |v| v.f());
        match callee {
            "sqrt" => Val::F(x.sqrt()),
            "fabs" => Val::F(x.abs()),
            "abs" => Val::I(args.first().map_or(0, |v| v.i()).abs()),
            "sin" => Val::F(x.sin()),
            "cos" => Val::F(x.cos()),
            "exp" => Val::F(x.exp()),
            "fmax" | "max" => Val::F(x.max(y)),
            "fmin" | "min" => Val::F(x.min(y)),
            "printf" | "puts" | "fprintf" | "putchar" => {
                self.io = true;
                Val::I(0)
            }
            _ => Val::I(0),
        }
    }

    pub fn exec(&mut self, n: &Node) {
        if self.returned {
            return;
        }
        self.tick();
        match &n.kind {
            NodeKind::Block => {
                for c in &n.children {
                    self.exec(c);
                }
            }
            NodeKind::VarDecl { name, dims, .. } => {
                if dims.is_empty() {
                    let v = n.children.first().map_or(Val::I(0), |e| self.eval(e));
                    self.scalars.insert(name.clone(), v);
                }
            }
            NodeKind::Assign => {
                let v = self.eval(&n.children[1]);
                self.store_at(&n.children[0], None, v);
            }
            NodeKind::CompoundAssign(op) => {
                let target = &n.children[0];
                let idx = matches!(target.kind, NodeKind::ArrayAccess { .. }).then(|| self.indices(target));
                let old = match (&target.kind, &idx) {
                    (NodeKind::ArrayAccess { name }, Some(idx)) => {
                        self.record(name, idx, false);
                        *self
                            .memory
                            .get(&(name.clone(), idx.clone()))
                            .unwrap_or(&initial(name, idx))
                    }
                    _ => self.load(target),
                };
                let new = match op {
                    AssignOp::Inc => binary(BinOp::Add, old, Val::I(1)),
                    AssignOp::Dec => binary(BinOp::Sub, old, Val::I(1)),
                    AssignOp::Add => binary(BinOp::Add, old, self.eval(&n.children[1])),
                    AssignOp::Sub => binary(BinOp::Sub, old, self.eval(&n.children[1])),
                    AssignOp::Mul => binary(BinOp::Mul, old, self.eval(&n.children[1])),
                    AssignOp::Div => binary(BinOp::Div, old, self.eval(&n.children[1])),
                };
                self.store_at(target, idx, new);
            }
            NodeKind::If => {
                if self.eval(&n.children[0]).truthy() {
                    self.exec(&n.children[1]);
                } else if let Some(e) = n.children.get(2) {
                    self.exec(e);
                }
            }
            NodeKind::ForLoop => {
                self.exec(&n.children[0]);
                while self.eval(&n.children[1]).truthy() && !self.returned {
                    self.exec(&n.children[3]);
                    self.exec(&n.children[2]);
                }
            }
            NodeKind::WhileLoop => {
                while self.eval(&n.children[0]).truthy() && !self.returned {
                    self.exec(&n.children[1]);
                }
            }
            NodeKind::Call { .. } => {
                self.eval(n);
            }
            NodeKind::Return => {
                if let Some(v) = n.children.first() {
                    self.eval(v);
                }
                self.returned = true;
            }
            other => panic!("cannot execute {other:?}"),
        }
    }

    /// Run `lp` with its bounds evaluated in the current state.
    pub fn run_loop(&mut self, lp: &CanonicalLoop) {
        let mut i = self.eval(&lp.lower).i();
        let mut k = 0u64;
        loop {
            let ub = self.eval(&lp.upper).i();
            let go = match lp.comparison {
                Comparison::Lt => i < ub,
                Comparison::Le => i <= ub,
                Comparison::Gt => i > ub,
                Comparison::Ge => i >= ub,
            };
            if !go || self.returned {
                break;
            }
            self.scalars.insert(lp.loop_var.clone(), Val::I(i));
            self.iter = Some(k);
            self.exec(&lp.body);
            self.iter = None;
            i += lp.stride;
            k += 1;
        }
    }

    /// Kinds of cross-iteration conflicts seen in the trace.
    pub fn carried(&self) -> BTreeSet<Carried> {
        let mut by_loc: HashMap<(&str, &[i64]), Vec<&Event>> = HashMap::new();
        for e in &self.events {
            by_loc
                .entry((e.array.as_str(), e.index.as_slice()))
                .or_default()
                .push(e);
        }
        let mut out = BTreeSet::new();
        for evs in by_loc.values() {
            for (j, later) in evs.iter().enumerate() {
                for earlier in &evs[..j] {
                    if earlier.iter == later.iter {
                        continue;
                    }
                    match (earlier.write, later.write) {
                        (true, true) => out.insert(Carried::Output),
                        (true, false) => out.insert(Carried::Flow),
                        (false, true) => out.insert(Carried::Anti),
                        (false, false) => false,
                    };
                }
            }
        }
        out
    }
}

fn binary(op: BinOp, a: Val, b: Val) -> Val {
    use BinOp::*;
    match (a, b) {
        (Val::I(x), Val::I(y)) => match op {
            Add => Val::I(x.wrapping_add(y)),
            Sub => Val::I(x.wrapping_sub(y)),
            Mul => Val::I(x.wrapping_mul(y)),
            Div => Val::I(if y == 0 { 0 } else { x.wrapping_div(y) }),
            Rem => Val::I(if y == 0 { 0 } else { x.wrapping_rem(y) }),
            Lt => Val::I((x < y) as i64),
            Le => Val::I((x <= y) as i64),
            Gt => Val::I((x > y) as i64),
            Ge => Val::I((x >= y) as i64),
            Eq => Val::I((x == y) as i64),
            Ne => Val::I((x != y) as i64),
            And | Or => unreachable!("short-circuit handled by caller"),
        },
        _ => {
            let (x, y) = (a.f(), b.f());
            match op {
                Add => Val::F(x + y),
                Sub => Val::F(x - y),
                Mul => Val::F(x * y),
                Div => Val::F(x / y),
                Rem => Val::F(x % y),
                Lt => Val::I((x < y) as i64),
                Le => Val::I((x <= y) as i64),
                Gt => Val::I((x > y) as i64),
                Ge => Val::I((x >= y) as i64),
                Eq => Val::I((x == y) as i64),
                Ne => Val::I((x != y) as i64),
                And | Or => unreachable!("short-circuit handled by caller"),
            }
        }
    }
}

/// Trace the loop of `lp` with default bindings.
pub fn trace_loop(lp: &CanonicalLoop) -> Machine {
    let mut m = Machine::default();
    m.run_loop(lp);
    m
}
