//! Strict parsing of model output into a directive plan.

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::analysis::ReductionOp;
use crate::frontend::is_omp_pragma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Construct {
    ParallelFor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Static,
    Dynamic,
    Guided,
    Auto,
    Runtime,
}

impl ScheduleKind {
    fn parse(s: &str) -> Option<ScheduleKind> {
        Some(match s {
            "static" => ScheduleKind::Static,
            "dynamic" => ScheduleKind::Dynamic,
            "guided" => ScheduleKind::Guided,
            "auto" => ScheduleKind::Auto,
            "runtime" => ScheduleKind::Runtime,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Clause {
    Private { vars: Vec<String> },
    Firstprivate { vars: Vec<String> },
    Reduction { op: ReductionOp, vars: Vec<String> },
    Schedule { kind: ScheduleKind, chunk: Option<u64> },
    NumThreads { n: u64 },
}

impl Clause {
    /// Variables named by a data-sharing clause.
    pub fn vars(&self) -> &[String] {
        match self {
            Clause::Private { vars } | Clause::Firstprivate { vars } | Clause::Reduction { vars, .. } => vars,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PragmaPlan {
    pub construct: Construct,
    pub clauses: Vec<Clause>,
    /// The directive line exactly as the model wrote it, trimmed.
    pub raw_text: String,
}

impl PragmaPlan {
    pub fn private_vars(&self) -> BTreeSet<&str> {
        self.collect(|c| matches!(c, Clause::Private { .. }))
    }

    pub fn firstprivate_vars(&self) -> BTreeSet<&str> {
        self.collect(|c| matches!(c, Clause::Firstprivate { .. }))
    }

    /// `(variable, op)` for every reduction clause entry.
    pub fn reductions(&self) -> Vec<(&str, ReductionOp)> {
        self.clauses
            .iter()
            .flat_map(|c| match c {
                Clause::Reduction { op, vars } => vars.iter().map(|v| (v.as_str(), *op)).collect(),
                _ => Vec::new(),
            })
            .collect()
    }

    fn collect(&self, pred: impl Fn(&Clause) -> bool) -> BTreeSet<&str> {
        self.clauses
            .iter()
            .filter(|c| pred(c))
            .flat_map(|c| c.vars().iter().map(String::as_str))
            .collect()
    }

    /// Every name in any clause.
    pub fn named_vars(&self) -> BTreeSet<&str> {
        self.collect(|_| true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum ResponseError {
    #[error("no line starting with `#pragma omp` in the response")]
    NoDirectiveFound,
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("clause syntax error: {0}")]
    ClauseSyntaxError(String),
    #[error("expected one directive, found {0}")]
    MultipleDirectives(usize),
}

impl ResponseError {
    pub fn code(&self) -> &'static str {
        match self {
            ResponseError::NoDirectiveFound => "NoDirectiveFound",
            ResponseError::UnsupportedConstruct(_) => "UnsupportedConstruct",
            ResponseError::ClauseSyntaxError(_) => "ClauseSyntaxError",
            ResponseError::MultipleDirectives(_) => "MultipleDirectives",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(u64),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Punct(c) => write!(f, "{c}"),
        }
    }
}

fn lex(s: &str) -> Result<Vec<Tok>, ResponseError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut w = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                w.push(c);
                chars.next();
            }
            out.push(Tok::Word(w));
        } else if c.is_ascii_digit() {
            let mut w = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                w.push(c);
                chars.next();
            }
            let n = w
                .parse()
                .map_err(|_| ResponseError::ClauseSyntaxError(format!("number `{w}` out of range")))?;
            out.push(Tok::Num(n));
        } else if "(),:+-*".contains(c) {
            out.push(Tok::Punct(c));
            chars.next();
        } else {
            return Err(ResponseError::ClauseSyntaxError(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Constructs and clauses we recognise as OpenMP but do not accept.
const OTHER_CONSTRUCTS: &[&str] = &[
    "simd",
    "task",
    "taskloop",
    "sections",
    "section",
    "single",
    "master",
    "critical",
    "atomic",
    "barrier",
    "target",
    "teams",
    "distribute",
    "ordered",
    "flush",
    "taskwait",
    "declare",
    "loop",
];

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ResponseError> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => Err(syntax(format!(
                "expected `{c}`, found {}",
                other.map_or("end of line".to_string(), |t| format!("`{t}`"))
            ))),
        }
    }

    fn ident(&mut self) -> Result<String, ResponseError> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            other => Err(syntax(format!(
                "expected a variable name, found {}",
                other.map_or("end of line".to_string(), |t| format!("`{t}`"))
            ))),
        }
    }

    fn num(&mut self) -> Result<u64, ResponseError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(n),
            other => Err(syntax(format!(
                "expected an integer, found {}",
                other.map_or("end of line".to_string(), |t| format!("`{t}`"))
            ))),
        }
    }

    /// `name (, name)* )`
    fn names_until_close(&mut self) -> Result<Vec<String>, ResponseError> {
        let mut v = vec![self.ident()?];
        loop {
            match self.next() {
                Some(Tok::Punct(',')) => v.push(self.ident()?),
                Some(Tok::Punct(')')) => return Ok(v),
                other => {
                    return Err(syntax(format!(
                        "expected `,` or `)`, found {}",
                        other.map_or("end of line".to_string(), |t| format!("`{t}`"))
                    )))
                }
            }
        }
    }
}

fn syntax(msg: String) -> ResponseError {
    ResponseError::ClauseSyntaxError(msg)
}

fn directive_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| is_omp_pragma(l)).map(str::trim).collect()
}

/// Parse a model response into a single `parallel for` plan.
///
/// Only lines that themselves start with `#pragma omp` count; prose and code
/// fences around them are ignored.
pub fn parse_response(text: &str) -> Result<PragmaPlan, ResponseError> {
    let lines = directive_lines(text);
    let line = match lines.as_slice() {
        [] => return Err(ResponseError::NoDirectiveFound),
        [one] => *one,
        many => return Err(ResponseError::MultipleDirectives(many.len())),
    };
    let after_hash = line.trim_start_matches('#').trim_start();
    let body = after_hash["pragma".len()..].trim_start()["omp".len()..].trim();
    let mut cur = Cursor {
        toks: lex(body)?,
        pos: 0,
    };

    let w1 = cur.next();
    let w2 = cur.peek().cloned();
    match (&w1, &w2) {
        (Some(Tok::Word(a)), Some(Tok::Word(b))) if a == "parallel" && b == "for" => {
            cur.next();
        }
        _ => {
            return Err(ResponseError::UnsupportedConstruct(
                body.split(|c: char| c == '(' || c.is_whitespace())
                    .take(2)
                    .collect::<Vec<_>>()
                    .join(" ")
                    .trim()
                    .to_string(),
            ))
        }
    }

    let mut clauses = Vec::new();
    let mut seen_kind: BTreeSet<&'static str> = BTreeSet::new();
    while let Some(tok) = cur.next() {
        let name = match tok {
            Tok::Punct(',') => continue,
            Tok::Word(w) => w,
            other => return Err(syntax(format!("unexpected `{other}`"))),
        };
        if OTHER_CONSTRUCTS.contains(&name.as_str()) {
            return Err(ResponseError::UnsupportedConstruct(format!("parallel for {name}")));
        }
        let clause = match name.as_str() {
            "private" | "firstprivate" => {
                cur.expect('(')?;
                let vars = cur.names_until_close()?;
                if name == "private" {
                    Clause::Private { vars }
                } else {
                    Clause::Firstprivate { vars }
                }
            }
            "reduction" => {
                cur.expect('(')?;
                let op_text = match cur.next() {
                    Some(Tok::Punct(c @ ('+' | '-' | '*'))) => c.to_string(),
                    Some(Tok::Word(w)) => w,
                    other => {
                        return Err(syntax(format!(
                            "expected a reduction operator, found {}",
                            other.map_or("end of line".to_string(), |t| format!("`{t}`"))
                        )))
                    }
                };
                let op = ReductionOp::parse(&op_text)
                    .ok_or_else(|| syntax(format!("unsupported reduction operator `{op_text}`")))?;
                cur.expect(':')?;
                Clause::Reduction {
                    op,
                    vars: cur.names_until_close()?,
                }
            }
            "schedule" => {
                if !seen_kind.insert("schedule") {
                    return Err(syntax("duplicate schedule clause".into()));
                }
                cur.expect('(')?;
                let kind_text = cur.ident()?;
                let kind = ScheduleKind::parse(&kind_text)
                    .ok_or_else(|| syntax(format!("unknown schedule kind `{kind_text}`")))?;
                let chunk = match cur.next() {
                    Some(Tok::Punct(')')) => None,
                    Some(Tok::Punct(',')) => {
                        let n = cur.num()?;
                        cur.expect(')')?;
                        Some(n)
                    }
                    _ => return Err(syntax("malformed schedule clause".into())),
                };
                if chunk == Some(0) {
                    return Err(syntax("schedule chunk must be positive".into()));
                }
                Clause::Schedule { kind, chunk }
            }
            "num_threads" => {
                if !seen_kind.insert("num_threads") {
                    return Err(syntax("duplicate num_threads clause".into()));
                }
                cur.expect('(')?;
                let n = cur.num()?;
                cur.expect(')')?;
                if n == 0 {
                    return Err(syntax("num_threads must be positive".into()));
                }
                Clause::NumThreads { n }
            }
            other => return Err(syntax(format!("unsupported clause `{other}`"))),
        };
        clauses.push(clause);
    }

    // each name at most once across all data-sharing clauses
    let mut named = BTreeSet::new();
    for c in &clauses {
        for v in c.vars() {
            if !named.insert(v.as_str()) {
                return Err(syntax(format!("`{v}` appears in more than one clause entry")));
            }
        }
    }

    Ok(PragmaPlan {
        construct: Construct::ParallelFor,
        clauses,
        raw_text: line.to_string(),
    })
}
