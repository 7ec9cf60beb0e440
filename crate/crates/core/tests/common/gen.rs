//! Random inputs: subset programs for the parser, affine loops for the solver.

use ompar::analysis::{
    brute_force_dependence, collect_accesses, test_dependence, AccessMode, AccessRecord, DependenceResult, LoopShape,
};
use ompar::frontend::{locate_loops, SourceFile};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Generates syntactically valid programs that respect the subset's
/// scoping rules: every name is declared once, arrays stay 1-D or 2-D.
pub struct ProgramGen<'r> {
    rng: &'r mut ChaCha8Rng,
}

const INT_VARS: &[&str] = &["i", "j", "n", "q", "K"];
const REAL_VARS: &[&str] = &["s", "t", "x"];
const FLOATS: &[&str] = &["0.5", "1.0", "2.25", "3.0", "0.125", "1e-3"];
const BINOPS: &[&str] = &["+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||"];

impl<'r> ProgramGen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng) -> Self {
        ProgramGen { rng }
    }

    fn pick<'a>(&mut self, xs: &'a [&'a str]) -> &'a str {
        xs.choose(self.rng).expect("nonempty")
    }

    fn index(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.pick(&["i", "j"]).to_string(),
            1 => format!("{} + {}", self.pick(&["i", "j"]), self.rng.gen_range(0..4)),
            2 => format!("{} * i - {}", self.rng.gen_range(1..4), self.rng.gen_range(0..3)),
            _ => self.rng.gen_range(0..8).to_string(),
        }
    }

    fn lvalue(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.pick(REAL_VARS).to_string(),
            1 => format!("a[{}]", self.index()),
            2 => format!("b[{}]", self.index()),
            _ => format!("G[{}][{}]", self.index(), self.index()),
        }
    }

    pub fn expr(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if leaf {
            return match self.rng.gen_range(0..5) {
                0 => self.rng.gen_range(0..100).to_string(),
                1 => self.pick(FLOATS).to_string(),
                2 => self.pick(INT_VARS).to_string(),
                3 => self.pick(REAL_VARS).to_string(),
                _ => format!("a[{}]", self.index()),
            };
        }
        match self.rng.gen_range(0..7) {
            0 => format!("-({})", self.expr(depth - 1)),
            1 => format!("!({})", self.expr(depth - 1)),
            2 => format!("sqrt({})", self.expr(depth - 1)),
            3 => format!("fmax({}, {})", self.expr(depth - 1), self.expr(depth - 1)),
            4 => format!("G[{}][{}]", self.index(), self.index()),
            _ => {
                let op = self.pick(BINOPS);
                let l = self.expr(depth - 1);
                let r = self.expr(depth - 1);
                if self.rng.gen_bool(0.5) {
                    format!("({l}) {op} {r}")
                } else {
                    format!("{l} {op} ({r})")
                }
            }
        }
    }

    fn for_header(&mut self) -> String {
        let v = self.pick(&["i", "j"]);
        match self.rng.gen_range(0..4) {
            0 => format!("for ({v} = 0; {v} < n; {v}++)"),
            1 => format!("for ({v} = n - 1; {v} >= 0; {v}--)"),
            2 => format!(
                "for ({v} = {}; {v} <= n; {v} += {})",
                self.rng.gen_range(0..3),
                self.rng.gen_range(1..4)
            ),
            _ => format!("for ({v} = 1; {v} * {v} < n; {v} = {v} + 1)"),
        }
    }

    pub fn stmt(&mut self, depth: u32, ind: usize) -> String {
        let pad = "    ".repeat(ind);
        let simple = depth == 0 || self.rng.gen_bool(0.35);
        if simple {
            return match self.rng.gen_range(0..7) {
                0 | 1 => format!("{pad}{} = {};\n", self.lvalue(), self.expr(2)),
                2 => format!(
                    "{pad}{} {} {};\n",
                    self.lvalue(),
                    self.pick(&["+=", "-=", "*=", "/="]),
                    self.expr(2)
                ),
                3 => format!("{pad}{}{};\n", self.lvalue(), self.pick(&["++", "--"])),
                4 => format!("{pad}printf(\"%f\\n\", {});\n", self.expr(1)),
                5 => format!("{pad}helper(a, {});\n", self.expr(1)),
                _ => format!("{pad};\n"),
            };
        }
        match self.rng.gen_range(0..4) {
            0 => {
                let mut s = format!(
                    "{pad}if ({}) {{\n{}{pad}}}",
                    self.expr(2),
                    self.stmt(depth - 1, ind + 1)
                );
                if self.rng.gen_bool(0.5) {
                    s += &format!(" else {{\n{}{pad}}}", self.stmt(depth - 1, ind + 1));
                }
                s + "\n"
            }
            1 => format!(
                "{pad}while ({}) {{\n{}{pad}}}\n",
                self.expr(1),
                self.stmt(depth - 1, ind + 1)
            ),
            2 => {
                let h = self.for_header();
                if self.rng.gen_bool(0.5) {
                    format!("{pad}{h}\n{}", self.stmt(depth - 1, ind + 1))
                } else {
                    let n = self.rng.gen_range(1..4);
                    let body: String = (0..n).map(|_| self.stmt(depth - 1, ind + 1)).collect();
                    format!("{pad}{h} {{\n{body}{pad}}}\n")
                }
            }
            _ => {
                let n = self.rng.gen_range(1..3);
                let body: String = (0..n).map(|_| self.stmt(depth - 1, ind + 1)).collect();
                format!("{pad}{{\n{body}{pad}}}\n")
            }
        }
    }

    pub fn program(&mut self) -> String {
        let mut out = String::from("#include <stdio.h>\n\ndouble G[8][8];\nint K;\n\n");
        let funcs = self.rng.gen_range(1..3);
        for f in 0..funcs {
            let returns = self.rng.gen_bool(0.5);
            let ret = if returns { "double" } else { "void" };
            out += &format!("{ret} f{f}(int n, double a[], double b[]) {{\n    int i;\n    int j;\n    int q = {};\n    double s;\n    double t;\n    double x = {};\n", self.rng.gen_range(0..9), self.pick(FLOATS));
            // comment trivia must not disturb the tree
            if self.rng.gen_bool(0.3) {
                out += "    /* setup */\n";
            }
            let n = self.rng.gen_range(1..5);
            for _ in 0..n {
                out += &self.stmt(3, 1);
            }
            if returns {
                out += &format!("    return {};\n", self.expr(2));
            }
            out += "}\n\n";
        }
        out
    }
}

/// One single-loop case with affine subscripts on a shared array.
#[derive(Debug, Clone)]
pub struct AffineCase {
    /// `(coeff, offset)` per dimension of the written access.
    pub write: Vec<(i64, i64)>,
    pub read: Vec<(i64, i64)>,
    pub lower: i64,
    pub trip: i64,
    pub stride: i64,
    pub descending: bool,
}

fn subscript((c, d): (i64, i64)) -> String {
    let coeff = if c < 0 {
        format!("-{} * i", -c)
    } else {
        format!("{c} * i")
    };
    match d {
        0 => coeff,
        d if d > 0 => format!("{coeff} + {d}"),
        d => format!("{coeff} - {}", -d),
    }
}

fn access(name: &str, dims: &[(i64, i64)]) -> String {
    let idx: String = dims.iter().map(|d| format!("[{}]", subscript(*d))).collect();
    format!("{name}{idx}")
}

impl AffineCase {
    pub fn random(rng: &mut ChaCha8Rng) -> AffineCase {
        let coeff = |rng: &mut ChaCha8Rng| *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
        let rank = if rng.gen_bool(0.25) { 2 } else { 1 };
        let dim = |rng: &mut ChaCha8Rng| (coeff(rng), rng.gen_range(-8..=8));
        let write = (0..rank).map(|_| dim(rng)).collect();
        let read = (0..rank).map(|_| dim(rng)).collect();
        let stride: i64 = rng.gen_range(1..=3);
        AffineCase {
            write,
            read,
            lower: rng.gen_range(-10..=10),
            trip: rng.gen_range(0..=64),
            stride,
            descending: rng.gen_bool(0.25),
        }
    }

    pub fn source(&self) -> String {
        let decl = if self.write.len() == 2 {
            "double a[512][512];"
        } else {
            "double a[512];"
        };
        let header = if self.descending {
            let start = self.lower + self.trip * self.stride;
            format!("for (i = {start}; i > {}; i -= {})", self.lower, self.stride)
        } else {
            let end = self.lower + self.trip * self.stride;
            format!("for (i = {}; i < {end}; i += {})", self.lower, self.stride)
        };
        format!(
            "{decl}\n\nvoid f(void) {{\n    int i;\n    {header}\n        {} = {} + 1.0;\n}}\n",
            access("a", &self.write),
            access("a", &self.read)
        )
    }
}

#[derive(Debug, Clone)]
pub struct CaseCheck {
    pub source: String,
    pub solver: DependenceResult,
    pub oracle: DependenceResult,
}

impl CaseCheck {
    pub fn false_negative(&self) -> bool {
        (self.oracle.exists && !self.solver.exists) || (self.oracle.carried && !self.solver.carried)
    }

    /// Exact agreement where the solver claims exactness.
    pub fn agrees(&self) -> bool {
        if self.solver.conservative {
            return !self.false_negative();
        }
        self.solver.exists == self.oracle.exists
            && self.solver.carried == self.oracle.carried
            && (self.oracle.distance.is_none() || self.solver.distance == self.oracle.distance)
    }
}

fn pair(acc: &[AccessRecord]) -> (AccessRecord, AccessRecord) {
    let w = acc
        .iter()
        .rev()
        .find(|a| a.variable == "a" && a.mode == AccessMode::Write)
        .expect("write");
    let r = acc
        .iter()
        .find(|a| a.variable == "a" && a.mode == AccessMode::Read)
        .expect("read");
    (w.clone(), r.clone())
}

/// Solver against oracle for the write/read pair and the write's self pair.
pub fn check_case(case: &AffineCase) -> Vec<CaseCheck> {
    let source = case.source();
    let file = SourceFile::parse(&source).unwrap_or_else(|e| panic!("{e}\n{source}"));
    let lp = locate_loops(&file.ast).loops.remove(0);
    let acc = collect_accesses(&lp);
    let (w, r) = pair(&acc);
    let space = lp.const_space().expect("constant bounds");
    let shape = LoopShape::of(&lp);
    [(&w, &r), (&w, &w)]
        .into_iter()
        .map(|(x, y)| CaseCheck {
            source: source.clone(),
            solver: test_dependence(x, y, &shape).expect("solver"),
            oracle: brute_force_dependence(x, y, &lp.loop_var, space).expect("oracle"),
        })
        .collect()
}
