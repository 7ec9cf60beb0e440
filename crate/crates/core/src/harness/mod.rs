//! Compile, verify and time sequential against parallelized builds.

pub mod bench;
pub mod compare;
pub mod report;
pub mod timing;
pub mod toolchain;

use serde::Serialize;
use thiserror::Error;

pub use bench::{default_threads, load_kernels, run_bench, BenchConfig, BUNDLED_KERNELS};
pub use compare::{compare_outputs, output_mismatch, Tolerance};
pub use report::{speedup_table, BenchReport, BenchRow, OmittedRow};
pub use timing::{run_and_time, run_once, TimedRun, TimingStats, DEFAULT_REPEATS, DEFAULT_TIMEOUT, MIN_REPEATS};
pub use toolchain::{compile, Toolchain, Variant, DEFAULT_OMP_FLAG, TOOLCHAIN_ENV};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum HarnessError {
    #[error("toolchain missing: {0}")]
    ToolchainMissing(String),
    #[error("compile failed:\n{stderr}")]
    CompileFailed { stderr: String },
    #[error("exited with status {code:?}: {stderr}")]
    NonZeroExit { code: Option<i32>, stderr: String },
    #[error("timed out after {seconds} s")]
    Timeout { seconds: f64 },
    #[error("at least 3 repeats required, got {0}")]
    InvalidRepeats(u32),
    #[error("{0}")]
    Io(String),
}
