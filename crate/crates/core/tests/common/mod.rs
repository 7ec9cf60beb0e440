//! Shared by the integration tests and the acceptance target.
#![allow(dead_code)]

pub mod contract;
pub mod gen;
pub mod trace;

use ompar::rewriter::ViolationCode;
use ompar::verdict::ReasonCode;
use std::path::{Path, PathBuf};

pub enum Expect {
    Parallel {
        private: &'static [&'static str],
        reductions: &'static [(&'static str, &'static str)],
    },
    Rejected(&'static [ReasonCode]),
}

pub struct Fixture {
    pub name: &'static str,
    pub expect: Expect,
    /// Wrong directives for the subject loop, with the code each must trigger.
    pub bad_plans: &'static [(&'static str, ViolationCode)],
}

use ReasonCode::*;
use ViolationCode::*;

/// The subject of each fixture is its first outermost loop.
pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "vector_add",
        expect: Expect::Parallel {
            private: &[],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for reduction(+:n)", SpuriousReduction),
            ("#pragma omp parallel for private(c)", PrivatizedArray),
            ("#pragma omp parallel for private(n)", PrivatizedLiveIn),
        ],
    },
    Fixture {
        name: "saxpy",
        expect: Expect::Parallel {
            private: &[],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for private(alpha)", PrivatizedLiveIn),
            ("#pragma omp parallel for reduction(+:y)", PrivatizedArray),
            ("#pragma omp parallel for private(z)", UnknownVariableInClause),
        ],
    },
    Fixture {
        name: "dot_product",
        expect: Expect::Parallel {
            private: &[],
            reductions: &[("s", "+")],
        },
        bad_plans: &[
            ("#pragma omp parallel for", MissingReduction),
            ("#pragma omp parallel for private(s)", MissingReduction),
            ("#pragma omp parallel for reduction(*:s)", MissingReduction),
        ],
    },
    Fixture {
        name: "prefix_sum",
        expect: Expect::Rejected(&[CarriedFlowDep]),
        bad_plans: &[
            ("#pragma omp parallel for", PragmaOnRejectedLoop),
            ("#pragma omp parallel for schedule(static, 1)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for firstprivate(x)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for private(a)", PragmaOnRejectedLoop),
        ],
    },
    Fixture {
        name: "backward_stencil",
        expect: Expect::Rejected(&[CarriedFlowDep]),
        bad_plans: &[
            ("#pragma omp parallel for", PragmaOnRejectedLoop),
            ("#pragma omp parallel for schedule(dynamic, 64)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for firstprivate(a)", PragmaOnRejectedLoop),
        ],
    },
    Fixture {
        name: "independent_stencil",
        expect: Expect::Parallel {
            private: &[],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for private(u)", PrivatizedArray),
            ("#pragma omp parallel for reduction(+:v)", PrivatizedArray),
            ("#pragma omp parallel for private(w)", UnknownVariableInClause),
        ],
    },
    Fixture {
        name: "printf_loop",
        expect: Expect::Rejected(&[IoCall]),
        bad_plans: &[
            ("#pragma omp parallel for", PragmaOnRejectedLoop),
            ("#pragma omp parallel for schedule(static)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for num_threads(4)", PragmaOnRejectedLoop),
        ],
    },
    Fixture {
        name: "unknown_call",
        expect: Expect::Rejected(&[UnknownCall]),
        bad_plans: &[
            ("#pragma omp parallel for", PragmaOnRejectedLoop),
            ("#pragma omp parallel for schedule(dynamic, 64)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for firstprivate(n)", PragmaOnRejectedLoop),
        ],
    },
    Fixture {
        name: "matmul",
        expect: Expect::Parallel {
            private: &["j", "k", "sum"],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for", MissingPrivate),
            ("#pragma omp parallel for private(j, k)", MissingPrivate),
            (
                "#pragma omp parallel for private(j, k) reduction(+:sum)",
                SpuriousReduction,
            ),
            ("#pragma omp parallel for private(j, sum)", SharedWrittenScalar),
        ],
    },
    Fixture {
        name: "histogram",
        expect: Expect::Rejected(&[CarriedFlowDep, CarriedOutputDep]),
        bad_plans: &[
            ("#pragma omp parallel for", PragmaOnRejectedLoop),
            ("#pragma omp parallel for reduction(+:h)", PragmaOnRejectedLoop),
            ("#pragma omp parallel for private(h)", PragmaOnRejectedLoop),
            (
                "#pragma omp parallel for schedule(dynamic, 64) firstprivate(b)",
                PragmaOnRejectedLoop,
            ),
        ],
    },
    Fixture {
        name: "private_temp",
        expect: Expect::Parallel {
            private: &["t"],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for", MissingPrivate),
            ("#pragma omp parallel for reduction(+:t)", SpuriousReduction),
            ("#pragma omp parallel for private(t, tmp)", UnknownVariableInClause),
        ],
    },
    Fixture {
        name: "row_scale_2d",
        expect: Expect::Parallel {
            private: &["j"],
            reductions: &[],
        },
        bad_plans: &[
            ("#pragma omp parallel for", MissingPrivate),
            ("#pragma omp parallel for private(M)", PrivatizedArray),
            ("#pragma omp parallel for private(j, m)", PrivatizedLiveIn),
        ],
    },
];

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(format!("{name}.c"))
}

pub fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn ompar_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_ompar"))
}
