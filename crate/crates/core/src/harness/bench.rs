//! The benchmark driver over a kernel set.

use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::*;

pub const BUNDLED_KERNELS: &[(&str, &str)] = &[
    ("matmul", include_str!("../../kernels/matmul.c")),
    ("dot", include_str!("../../kernels/dot.c")),
    ("jacobi", include_str!("../../kernels/jacobi.c")),
    ("histogram", include_str!("../../kernels/histogram.c")),
];

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub toolchain: Option<Toolchain>,
    pub repeats: u32,
    /// Defaults to the detected core count.
    pub threads: Option<usize>,
    pub timeout: Duration,
    pub tolerance: Tolerance,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            toolchain: None,
            repeats: DEFAULT_REPEATS,
            threads: None,
            timeout: DEFAULT_TIMEOUT,
            tolerance: Tolerance::default(),
        }
    }
}

/// Logical cores available to this process.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// `(name, source)` pairs for every `*.c` file in `dir`, sorted by name.
pub fn load_kernels(dir: &Path) -> Result<Vec<(String, String)>, HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", dir.display()));
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "c") && !p.to_string_lossy().ends_with(".omp.c"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            std::fs::read_to_string(&p).map(|s| (name, s)).map_err(io)
        })
        .collect()
}

struct Built {
    name: String,
    seq: Result<PathBuf, String>,
    par: Result<PathBuf, String>,
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim()
}

fn describe(e: &HarnessError) -> String {
    match e {
        HarnessError::CompileFailed { stderr } => format!("CompileFailed: {}", first_line(stderr)),
        e => e.to_string(),
    }
}

/// Compile and time every kernel.
///
/// `parallelize(name, source)` yields the OpenMP variant's text or the
/// reason there is none. Compiles run concurrently; timed runs one at a
/// time. A kernel that fails anywhere is noted and the rest continue.
pub fn run_bench(
    kernels: &[(String, String)],
    cfg: &BenchConfig,
    work_dir: &Path,
    parallelize: &(dyn Fn(&str, &str) -> Result<String, String> + Sync),
) -> Result<BenchReport, HarnessError> {
    let tc = cfg
        .toolchain
        .as_ref()
        .ok_or_else(|| HarnessError::ToolchainMissing("no toolchain configured".into()))?;
    let threads = cfg.threads.unwrap_or_else(default_threads);
    std::fs::create_dir_all(work_dir).map_err(|e| HarnessError::Io(format!("{}: {e}", work_dir.display())))?;

    let built: Vec<Built> = kernels
        .par_iter()
        .map(|(name, src)| {
            let write = |file: String, text: &str| -> Result<PathBuf, String> {
                let p = work_dir.join(file);
                std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))?;
                Ok(p)
            };
            let seq = write(format!("{name}.c"), src).and_then(|p| {
                compile(&p, Variant::Sequential, Some(tc), &work_dir.join(format!("{name}.seq")))
                    .map_err(|e| describe(&e))
            });
            let par = parallelize(name, src)
                .map_err(|r| format!("no parallel variant: {r}"))
                .and_then(|text| write(format!("{name}.omp.c"), &text))
                .and_then(|p| {
                    compile(&p, Variant::OpenMp, Some(tc), &work_dir.join(format!("{name}.omp")))
                        .map_err(|e| describe(&e))
                });
            Built {
                name: name.clone(),
                seq,
                par,
            }
        })
        .collect();

    let mut report = BenchReport::default();
    for b in built {
        let (seq, par) = match (b.seq, b.par) {
            (Ok(s), Ok(p)) => (s, p),
            (Err(e), _) | (_, Err(e)) => {
                report.omit(&b.name, &e);
                continue;
            }
        };
        let timed = run_and_time(&seq, &[], cfg.repeats, Some(1), cfg.timeout)
            .and_then(|s| run_and_time(&par, &[], cfg.repeats, Some(threads), cfg.timeout).map(|p| (s, p)));
        match timed {
            Ok((s, p)) => {
                let mismatch = output_mismatch(&s.stdout, &p.stdout, &cfg.tolerance);
                report.add(&b.name, s.stats, Some(p.stats), mismatch.is_none(), threads, mismatch);
            }
            Err(e) => report.omit(&b.name, &describe(&e)),
        }
    }
    Ok(report)
}
