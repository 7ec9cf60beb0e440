//! Static dependence analysis of canonical loops.

pub mod access;
pub mod blockers;
pub mod dependence;
pub mod oracle;
pub mod scalars;
pub mod subscript;

use serde::Serialize;

pub use access::{collect_accesses, AccessMode, AccessRecord};
pub use blockers::{find_blockers, Blockers, CallPolicy, CallSite};
pub use dependence::{
    array_dependences, test_dependence, DepKind, DependenceError, DependenceResult, LabeledDependence, LoopShape,
};
pub use oracle::{brute_force_dependence, brute_force_dependence_with, OracleEnv, OracleError};
pub use scalars::{classify_scalars, ReductionOp, ScalarClass, ScalarKind};
pub use subscript::{classify_subscript, classify_subscript_with, SubscriptForm};

use crate::frontend::CanonicalLoop;

/// Everything the verdict needs to know about one loop.
#[derive(Debug, Clone, Serialize)]
pub struct LoopAnalysis {
    #[serde(rename = "loop")]
    pub lp: CanonicalLoop,
    pub accesses: Vec<AccessRecord>,
    pub io_blockers: Vec<CallSite>,
    pub unknown_calls: Vec<CallSite>,
    pub scalar_classes: Vec<ScalarClass>,
    pub array_deps: Vec<LabeledDependence>,
    /// The loop variable's final value is read after the loop.
    pub loop_var_live_after: bool,
}

impl LoopAnalysis {
    pub fn scalar(&self, name: &str) -> Option<&ScalarClass> {
        self.scalar_classes.iter().find(|c| c.variable == name)
    }
}

pub fn analyze_loop(lp: &CanonicalLoop, policy: &CallPolicy) -> LoopAnalysis {
    let accesses = collect_accesses(lp);
    let blockers = find_blockers(&lp.body, policy);
    let scalar_classes = classify_scalars(lp, &accesses);
    let array_deps = array_dependences(&accesses, &LoopShape::of(lp));
    LoopAnalysis {
        loop_var_live_after: !lp.var_declared_in_init && lp.live_after.contains(&lp.loop_var),
        lp: lp.clone(),
        accesses,
        io_blockers: blockers.io,
        unknown_calls: blockers.unknown,
        scalar_classes,
        array_deps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{locate_loops, SourceFile};

    fn analyze(src: &str) -> Vec<LoopAnalysis> {
        let f = SourceFile::parse(src).unwrap();
        locate_loops(&f.ast)
            .loops
            .iter()
            .map(|l| analyze_loop(l, &CallPolicy::default()))
            .collect()
    }

    #[test]
    fn vector_add_has_no_carried_dependence() {
        let a = analyze(
            "void f(int n, double a[], double b[], double c[]) { int i; for (i = 0; i < n; i++) c[i] = a[i] + b[i]; }",
        );
        assert!(a[0].array_deps.iter().all(|d| !d.result.carried));
        assert!(a[0].io_blockers.is_empty() && a[0].unknown_calls.is_empty());
    }

    #[test]
    fn matmul_outer_loop_is_clean() {
        let a = analyze(
            "double a[8][8]; double b[8][8]; double c[8][8];
             void mm() { int i; int j; int k; double sum;
               for (i = 0; i < 8; i++)
                 for (j = 0; j < 8; j++) {
                   sum = 0.0;
                   for (k = 0; k < 8; k++) sum += a[i][k] * b[k][j];
                   c[i][j] = sum;
                 }
             }",
        );
        assert!(
            a[0].array_deps.iter().all(|d| !d.result.carried),
            "{:?}",
            a[0].array_deps
        );
        let priv_names: Vec<&str> = a[0]
            .scalar_classes
            .iter()
            .filter(|c| c.kind == ScalarKind::Private)
            .map(|c| c.variable.as_str())
            .collect();
        assert_eq!(priv_names, ["j", "k", "sum"]);
        assert!(!a[0].loop_var_live_after);
    }

    #[test]
    fn loop_variable_read_after_loop() {
        let a = analyze("int f(int n, double a[]) { int i; for (i = 0; i < n; i++) a[i] = 0.0; return i; }");
        assert!(a[0].loop_var_live_after);
    }

    #[test]
    fn histogram_has_carried_flow_and_output() {
        let a = analyze("void f(int n, int h[], int b[]) { int i; for (i = 0; i < n; i++) h[b[i]]++; }");
        let kinds: Vec<_> = a[0]
            .array_deps
            .iter()
            .filter(|d| d.result.carried)
            .filter_map(|d| d.result.kind)
            .collect();
        assert!(kinds.contains(&DepKind::Flow));
        assert!(kinds.contains(&DepKind::Output));
    }
}
