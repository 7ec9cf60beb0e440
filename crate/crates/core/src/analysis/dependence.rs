//! Exact affine dependence testing.
//!
//! Each subscript pair gives one linear equation over the iteration counters
//! `(k1, k2)` of the two accesses, where the loop variable is
//! `start + stride * k`. The system is solved over the integers with extended
//! gcd, intersected with `0 <= k < trip`, and the set of counter differences
//! `k2 - k1` decides existence, direction, and distance.

use serde::Serialize;
use thiserror::Error;

use super::access::{AccessMode, AccessRecord};
use super::subscript::SubscriptForm;
use crate::frontend::CanonicalLoop;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DepKind {
    Flow,
    Anti,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DependenceResult {
    pub exists: bool,
    pub kind: Option<DepKind>,
    /// Collides across distinct iterations.
    pub carried: bool,
    /// Constant `i_sink - i_source` in loop-variable units, when known.
    pub distance: Option<i64>,
    /// The answer was assumed rather than proven.
    pub conservative: bool,
}

impl DependenceResult {
    pub fn none() -> DependenceResult {
        DependenceResult {
            exists: false,
            kind: None,
            carried: false,
            distance: None,
            conservative: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DependenceError {
    #[error("accesses refer to different variables `{0}` and `{1}`")]
    MismatchedArray(String, String),
    #[error("neither access writes")]
    NoWrite,
}

/// Dependence between two accesses, labeled by their order indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledDependence {
    pub variable: String,
    pub source: usize,
    pub sink: usize,
    #[serde(flatten)]
    pub result: DependenceResult,
}

/// Symmetric per-loop facts needed by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopShape {
    /// `None` when the lower bound is not a constant.
    pub start: Option<i64>,
    pub stride: i64,
    /// `None` when the trip count is not a constant.
    pub trip: Option<u64>,
}

impl LoopShape {
    pub fn of(lp: &CanonicalLoop) -> LoopShape {
        LoopShape {
            start: lp.start_const(),
            stride: lp.stride,
            trip: lp.const_space().map(|s| s.trip),
        }
    }
}

/// One dimension's equation `a*k1 - b*k2 = e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DimEq {
    Eq { a: i128, b: i128, e: i128 },
    Never,
    Unknown,
}

fn dim_equation(f1: &SubscriptForm, f2: &SubscriptForm, shape: &LoopShape) -> DimEq {
    let (Some((c1, d1, t1)), Some((c2, d2, t2))) = (f1.linear_parts(), f2.linear_parts()) else {
        return DimEq::Unknown;
    };
    if t1 != t2 {
        return DimEq::Unknown;
    }
    let (c1, d1, c2, d2) = (c1 as i128, d1 as i128, c2 as i128, d2 as i128);
    let sigma = shape.stride as i128;
    match shape.start {
        Some(s) => {
            let s = s as i128;
            DimEq::Eq {
                a: c1 * sigma,
                b: c2 * sigma,
                e: (c2 * s + d2) - (c1 * s + d1),
            }
        }
        None if c1 == c2 => DimEq::Eq {
            a: c1 * sigma,
            b: c2 * sigma,
            e: d2 - d1,
        },
        None => {
            // i-space gcd test on c1*i1 - c2*i2 = d2 - d1
            let g = gcd(c1, c2);
            if g != 0 && (d2 - d1) % g != 0 {
                DimEq::Never
            } else {
                DimEq::Unknown
            }
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Integer solutions `(k1, k2)` of the equations seen so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Solution {
    All,
    Line { p: (i128, i128), v: (i128, i128) },
    Point(i128, i128),
    Empty,
}

fn solve_one(a: i128, b: i128, e: i128) -> Solution {
    // a*k1 - b*k2 = e
    if a == 0 && b == 0 {
        return if e == 0 { Solution::All } else { Solution::Empty };
    }
    let (g, x, y) = ext_gcd(a, -b);
    if e % g != 0 {
        return Solution::Empty;
    }
    let m = e / g;
    Solution::Line {
        p: (x * m, y * m),
        v: (-b / g, -a / g),
    }
}

fn refine(sol: Solution, a: i128, b: i128, e: i128) -> Solution {
    match sol {
        Solution::Empty => Solution::Empty,
        Solution::All => solve_one(a, b, e),
        Solution::Point(k1, k2) => {
            if a * k1 - b * k2 == e {
                sol
            } else {
                Solution::Empty
            }
        }
        Solution::Line { p, v } => {
            // a*(p1 + t v1) - b*(p2 + t v2) = e  =>  t * (a v1 - b v2) = e - (a p1 - b p2)
            let coef = a * v.0 - b * v.1;
            let rhs = e - (a * p.0 - b * p.1);
            if coef == 0 {
                if rhs == 0 {
                    sol
                } else {
                    Solution::Empty
                }
            } else if rhs % coef != 0 {
                Solution::Empty
            } else {
                let t = rhs / coef;
                Solution::Point(p.0 + t * v.0, p.1 + t * v.1)
            }
        }
    }
}

/// What the difference `k2 - k1` can be over the solution set in the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct DiffFacts {
    any: bool,
    pos: bool,
    neg: bool,
    zero: bool,
    constant: Option<i128>,
}

impl DiffFacts {
    fn constant(d: i128) -> DiffFacts {
        DiffFacts {
            any: true,
            pos: d > 0,
            neg: d < 0,
            zero: d == 0,
            constant: Some(d),
        }
    }
}

fn in_box(k: i128, hi: Option<i128>) -> bool {
    k >= 0 && hi.is_none_or(|h| k <= h)
}

/// `t` range for `p + t*v` in `[0, hi]`; bounds are `None` when unbounded.
fn t_range(p: i128, v: i128, hi: Option<i128>) -> Option<(Option<i128>, Option<i128>)> {
    if v == 0 {
        return in_box(p, hi).then_some((None, None));
    }
    // 0 <= p + t v
    let from_zero = if v > 0 {
        (Some(ceil_div(-p, v)), None)
    } else {
        (None, Some(floor_div(-p, v)))
    };
    let from_hi = match hi {
        None => (None, None),
        Some(h) if v > 0 => (None, Some(floor_div(h - p, v))),
        Some(h) => (Some(ceil_div(h - p, v)), None),
    };
    Some((max_opt(from_zero.0, from_hi.0), min_opt(from_zero.1, from_hi.1)))
}

fn max_opt(a: Option<i128>, b: Option<i128>) -> Option<i128> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<i128>, b: Option<i128>) -> Option<i128> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn diff_facts(sol: Solution, trip: Option<u64>) -> DiffFacts {
    let hi = trip.map(|t| t as i128 - 1);
    if hi.is_some_and(|h| h < 0) {
        return DiffFacts::default();
    }
    match sol {
        Solution::Empty => DiffFacts::default(),
        Solution::Point(k1, k2) => {
            if in_box(k1, hi) && in_box(k2, hi) {
                DiffFacts::constant(k2 - k1)
            } else {
                DiffFacts::default()
            }
        }
        Solution::All => {
            let wide = hi.is_none_or(|h| h >= 1);
            DiffFacts {
                any: true,
                pos: wide,
                neg: wide,
                zero: true,
                constant: if wide { None } else { Some(0) },
            }
        }
        Solution::Line { p, v } => {
            let (Some(r1), Some(r2)) = (t_range(p.0, v.0, hi), t_range(p.1, v.1, hi)) else {
                return DiffFacts::default();
            };
            let lo = max_opt(r1.0, r2.0);
            let up = min_opt(r1.1, r2.1);
            if let (Some(l), Some(u)) = (lo, up) {
                if l > u {
                    return DiffFacts::default();
                }
            }
            let d0 = p.1 - p.0;
            let dv = v.1 - v.0;
            if dv == 0 {
                return DiffFacts::constant(d0);
            }
            if let Some(t) = lo.filter(|_| lo == up) {
                return DiffFacts::constant(d0 + t * dv);
            }
            let at = |t: i128| d0 + t * dv;
            // the difference is monotone in t
            let (max_t, min_t) = if dv > 0 { (up, lo) } else { (lo, up) };
            let pos = max_t.is_none_or(|t| at(t) > 0);
            let neg = min_t.is_none_or(|t| at(t) < 0);
            let zero = (-d0) % dv == 0 && {
                let t0 = -d0 / dv;
                lo.is_none_or(|l| t0 >= l) && up.is_none_or(|u| t0 <= u)
            };
            DiffFacts {
                any: true,
                pos,
                neg,
                zero,
                constant: None,
            }
        }
    }
}

/// Test whether `w` and `r` may touch the same element.
///
/// At least one access must write; if only `r` writes the two are swapped.
/// Passing the same write record twice tests for collisions of that write
/// across distinct iterations.
pub fn test_dependence(
    w: &AccessRecord,
    r: &AccessRecord,
    shape: &LoopShape,
) -> Result<DependenceResult, DependenceError> {
    if w.variable != r.variable {
        return Err(DependenceError::MismatchedArray(w.variable.clone(), r.variable.clone()));
    }
    let (w, r) = match (w.mode, r.mode) {
        (AccessMode::Read, AccessMode::Read) => return Err(DependenceError::NoWrite),
        (AccessMode::Read, AccessMode::Write) => (r, w),
        _ => (w, r),
    };
    let self_pair = w.order_index == r.order_index;

    let mut sol = Solution::All;
    let mut unknown = false;
    if w.subscripts.len() != r.subscripts.len() {
        unknown = true;
    } else {
        for (f1, f2) in w.subscripts.iter().zip(&r.subscripts) {
            match dim_equation(f1, f2, shape) {
                DimEq::Never => return Ok(DependenceResult::none()),
                DimEq::Unknown => unknown = true,
                DimEq::Eq { a, b, e } => sol = refine(sol, a, b, e),
            }
        }
    }

    let facts = diff_facts(sol, shape.trip);
    if !facts.any {
        return Ok(DependenceResult::none());
    }
    let carried = facts.pos || facts.neg;
    if self_pair && !carried {
        return Ok(DependenceResult::none());
    }
    let flow = facts.pos || (facts.zero && w.order_index < r.order_index);
    let anti = facts.neg || (facts.zero && r.order_index < w.order_index);
    if !self_pair && !flow && !anti {
        return Ok(DependenceResult::none());
    }
    let kind = if r.mode == AccessMode::Write {
        DepKind::Output
    } else if flow {
        DepKind::Flow
    } else {
        DepKind::Anti
    };
    let distance = facts
        .constant
        .and_then(|d| i64::try_from(d * shape.stride as i128).ok());
    Ok(DependenceResult {
        exists: true,
        kind: Some(kind),
        carried,
        distance,
        conservative: unknown || (carried && shape.trip.is_none()),
    })
}

/// Every dependence among accesses of shared arrays in a loop.
///
/// Pairs are `(earlier, later)` in order index, plus each write against
/// itself. Only pairs whose test reports `exists` are returned.
pub fn array_dependences(accesses: &[AccessRecord], shape: &LoopShape) -> Vec<LabeledDependence> {
    let arrays: Vec<&AccessRecord> = accesses.iter().filter(|a| a.is_array && !a.body_local).collect();
    let mut out = Vec::new();
    for (x, a) in arrays.iter().enumerate() {
        for b in &arrays[x..] {
            if a.variable != b.variable {
                continue;
            }
            let self_pair = a.order_index == b.order_index;
            if self_pair && a.mode != AccessMode::Write {
                continue;
            }
            let Ok(res) = test_dependence(a, b, shape) else {
                continue;
            };
            if res.exists {
                let (src, snk) = if a.mode == AccessMode::Write { (a, b) } else { (b, a) };
                out.push(LabeledDependence {
                    variable: a.variable.clone(),
                    source: src.order_index,
                    sink: snk.order_index,
                    result: res,
                });
            }
        }
    }
    out
}
