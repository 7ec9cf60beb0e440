//! The `ompar` command line.
//!
//! Exit codes: 0 success or skip, 2 input error, 3 every eligible loop's
//! plan was rejected, 4 backend failure.

pub mod config;
pub mod report;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::analysis::CallPolicy;
use crate::backend::{make_backend, Backend, BackendKind};
use crate::harness::{load_kernels, run_bench, speedup_table, BenchConfig, Tolerance, BUNDLED_KERNELS};
use crate::pipeline::{
    analyze_source, loop_reports, parallelize_source, skipped_reports, PipelineError, PipelineOptions,
};
use crate::prompting::{load_corpus, IclCorpus};

pub use config::{FileConfig, HarnessSettings, OutputMode, Overrides, RunConfig};
pub use report::{FileReport, FileStatus, RunReport, Summary, REPORT_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;
pub const EXIT_BACKEND: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ompar",
    version,
    about = "Insert analysis-checked OpenMP parallel-for directives into C code"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report loops, their analysis facts and verdicts.
    Analyze(AnalyzeArgs),
    /// Rewrite files with validated directives.
    Parallelize(ParallelizeArgs),
    /// Time sequential against parallelized kernels.
    Bench(BenchArgs),
    /// Inspect the in-context example corpus.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Print `id<TAB>tags` per example.
    List {
        #[arg(long, env = "OMPAR_CORPUS")]
        corpus: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long, env = "OMPAR_CONFIG")]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, env = "OMPAR_JOBS")]
    pub jobs: Option<usize>,
    /// Extra functions treated as side-effect free (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub allow: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    #[arg(long, env = "OMPAR_BACKEND", value_parser = clap::value_parser!(BackendKind))]
    pub backend: Option<BackendKind>,
    #[arg(long, env = "OMPAR_ENDPOINT")]
    pub endpoint: Option<String>,
    #[arg(long, env = "OMPAR_MODEL")]
    pub model: Option<String>,
    /// Name of the variable holding the API key.
    #[arg(long, env = "OMPAR_API_KEY_ENV")]
    pub api_key_env: Option<String>,
    /// Directory of `.icl` examples; the bundled set when omitted.
    #[arg(long, env = "OMPAR_CORPUS")]
    pub corpus: Option<PathBuf>,
    #[arg(long, env = "OMPAR_K")]
    pub k: Option<usize>,
    /// Prompt token budget.
    #[arg(long, env = "OMPAR_BUDGET")]
    pub budget: Option<usize>,
    /// Re-prompt once with the rejection reasons.
    #[arg(long)]
    pub retry: bool,
}

#[derive(Debug, Args)]
pub struct ParallelizeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, conflicts_with = "stdout")]
    pub in_place: bool,
    /// Print rewritten sources instead of writing files.
    #[arg(long)]
    pub stdout: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of kernel `.c` files; the bundled set when omitted.
    pub kernel_dir: Option<PathBuf>,
    /// Compiler template with {input} {output} {ompflag}.
    #[arg(long, env = "OMPAR_TOOLCHAIN")]
    pub toolchain: Option<String>,
    #[arg(long)]
    pub repeats: Option<u32>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Per-run timeout in seconds.
    #[arg(long)]
    pub timeout: Option<u64>,
    /// Where sources and binaries go; a temporary directory when omitted.
    #[arg(long)]
    pub work_dir: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, String> {
    path.map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
}

fn overrides(b: Option<&BackendArgs>, c: &CommonArgs) -> Overrides {
    let mut o = Overrides {
        allow: c.allow.clone(),
        jobs: c.jobs,
        report: c.report.clone(),
        ..Overrides::default()
    };
    if let Some(b) = b {
        o.backend = b.backend;
        o.endpoint = b.endpoint.clone();
        o.model = b.model.clone();
        o.api_key_env = b.api_key_env.clone();
        o.corpus = b.corpus.clone();
        o.k = b.k;
        o.token_budget = b.budget;
        o.retry = b.retry;
    }
    o
}

fn load_corpus_at(path: Option<&Path>) -> Result<IclCorpus, String> {
    match path {
        Some(p) => load_corpus(p).map_err(|e| e.to_string()),
        None => Ok(IclCorpus::bundled()),
    }
}

fn emit_report(report: &RunReport, path: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Sibling output path: `dir/name.c` becomes `dir/name.omp.c`.
pub fn sibling_output(input: &Path) -> PathBuf {
    input.with_extension("omp.c")
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn cmd_analyze(args: AnalyzeArgs) -> i32 {
    let cfg = match load_file_config(args.common.config.as_deref())
        .and_then(|f| RunConfig::resolve(f, overrides(None, &args.common)))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let policy = CallPolicy::with_extra(cfg.allowlist_extra.clone());
    let files: Vec<FileReport> = with_pool(cfg.jobs, || {
        args.files
            .par_iter()
            .map(|path| {
                let name = display(path);
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => return FileReport::error(&name, FileStatus::InputError, e.to_string()),
                };
                match analyze_source(&text, &policy) {
                    Ok(fa) => FileReport {
                        file: name,
                        status: FileStatus::Ok,
                        error: None,
                        output: None,
                        loops: loop_reports(&fa, true, None),
                        skipped: skipped_reports(&fa),
                        injected_at: None,
                        diff: None,
                    },
                    Err(e) => FileReport::error(&name, FileStatus::InputError, e.to_string()),
                }
            })
            .collect()
    });
    let mut summary = Summary {
        files: files.len(),
        ..Summary::default()
    };
    for f in &files {
        if let Some(e) = &f.error {
            eprintln!("{}: {e}", f.file);
            summary.exit_code = EXIT_INPUT;
        }
        summary.loops += f.loops.len();
        summary.parallelizable += f.loops.iter().filter(|l| l.verdict.is_parallelizable()).count();
    }
    let code = summary.exit_code;
    let report = RunReport {
        tool: "ompar",
        report_version: REPORT_VERSION,
        command: "analyze",
        files,
        summary,
    };
    if let Err(e) = emit_report(&report, cfg.report_path.as_deref()) {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    code
}

struct Processed {
    report: FileReport,
    eligible: usize,
    injected: usize,
    output_text: Option<String>,
}

fn process_file(
    path: &Path,
    cfg: &RunConfig,
    corpus: &IclCorpus,
    backend: &dyn Backend,
    opts: &PipelineOptions,
) -> Processed {
    let name = display(path);
    let fail = |status, msg: String| Processed {
        report: FileReport::error(&name, status, msg),
        eligible: 0,
        injected: 0,
        output_text: None,
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(FileStatus::InputError, e.to_string()),
    };
    let out = match parallelize_source(&text, &name, corpus, backend, opts) {
        Ok(o) => o,
        Err(e @ PipelineError::Backend(_)) => return fail(FileStatus::BackendError, e.to_string()),
        Err(e) => return fail(FileStatus::InputError, e.to_string()),
    };
    let output = match cfg.output_mode {
        OutputMode::Sibling => Some(sibling_output(path)),
        OutputMode::InPlace => Some(path.to_path_buf()),
        OutputMode::Stdout => None,
    };
    if let Some(o) = &output {
        if *o != path || out.output_text != text {
            if let Err(e) = std::fs::write(o, &out.output_text) {
                return fail(FileStatus::InputError, format!("{}: {e}", o.display()));
            }
        }
    }
    Processed {
        report: FileReport {
            file: name,
            status: FileStatus::Ok,
            error: None,
            output: output.as_deref().map(display),
            loops: loop_reports(&out.analysis, false, Some(&out.outcomes)),
            skipped: skipped_reports(&out.analysis),
            injected_at: Some(out.injected_at.clone()),
            diff: Some(out.diff.clone()),
        },
        eligible: out.eligible(),
        injected: out.injected(),
        output_text: (cfg.output_mode == OutputMode::Stdout).then_some(out.output_text),
    }
}

fn cmd_parallelize(args: ParallelizeArgs) -> i32 {
    let mut o = overrides(Some(&args.backend), &args.common);
    o.output_mode = if args.in_place {
        Some(OutputMode::InPlace)
    } else if args.stdout {
        Some(OutputMode::Stdout)
    } else {
        None
    };
    let cfg = match load_file_config(args.common.config.as_deref()).and_then(|f| RunConfig::resolve(f, o)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let corpus = match load_corpus_at(cfg.corpus_path.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let backend = match make_backend(&cfg.backend) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let opts = PipelineOptions {
        k: cfg.k_examples,
        token_budget: cfg.token_budget,
        policy: CallPolicy::with_extra(cfg.allowlist_extra.clone()),
        retry: cfg.retry,
    };
    let processed: Vec<Processed> = with_pool(cfg.jobs, || {
        args.files
            .par_iter()
            .map(|p| process_file(p, &cfg, &corpus, backend.as_ref(), &opts))
            .collect()
    });

    let mut summary = Summary {
        files: processed.len(),
        ..Summary::default()
    };
    let (mut input_err, mut backend_err) = (false, false);
    let mut files = Vec::with_capacity(processed.len());
    for p in processed {
        match p.report.status {
            FileStatus::InputError => input_err = true,
            FileStatus::BackendError => backend_err = true,
            FileStatus::Ok => {}
        }
        if let Some(e) = &p.report.error {
            eprintln!("{}: {e}", p.report.file);
        } else {
            eprintln!(
                "{}: {} loop(s), {} eligible, {} injected{}",
                p.report.file,
                p.report.loops.len(),
                p.eligible,
                p.injected,
                p.report
                    .output
                    .as_deref()
                    .map(|o| format!(" -> {o}"))
                    .unwrap_or_default()
            );
        }
        if let Some(t) = &p.output_text {
            print!("{t}");
        }
        summary.loops += p.report.loops.len();
        summary.parallelizable += p.report.loops.iter().filter(|l| l.verdict.is_parallelizable()).count();
        summary.eligible += p.eligible;
        summary.injected += p.injected;
        files.push(p.report);
    }
    summary.exit_code = if backend_err {
        EXIT_BACKEND
    } else if input_err {
        EXIT_INPUT
    } else if summary.eligible > 0 && summary.injected == 0 {
        EXIT_REJECTED
    } else {
        EXIT_OK
    };
    let code = summary.exit_code;
    let report = RunReport {
        tool: "ompar",
        report_version: REPORT_VERSION,
        command: "parallelize",
        files,
        summary,
    };
    let dest = cfg.report_path.as_deref();
    if dest.is_some() || cfg.output_mode != OutputMode::Stdout {
        if let Err(e) = emit_report(&report, dest) {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    }
    code
}

fn cmd_bench(args: BenchArgs) -> i32 {
    let file = match load_file_config(args.common.config.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let hs = HarnessSettings::resolve(
        &file.harness,
        args.toolchain.clone(),
        args.repeats,
        args.threads,
        args.timeout,
    );
    let cfg = match RunConfig::resolve(file, overrides(Some(&args.backend), &args.common)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if hs.toolchain.is_none() {
        println!("SKIPPED: no toolchain configured (set --toolchain or OMPAR_TOOLCHAIN)");
        return EXIT_OK;
    }
    let kernels: Vec<(String, String)> = match &args.kernel_dir {
        Some(d) => match load_kernels(d) {
            Ok(k) => k,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        },
        None => BUNDLED_KERNELS
            .iter()
            .map(|(n, s)| (n.to_string(), s.to_string()))
            .collect(),
    };
    let (corpus, backend) = match load_corpus_at(cfg.corpus_path.as_deref())
        .and_then(|c| make_backend(&cfg.backend).map(|b| (c, b)).map_err(|e| e.to_string()))
    {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let opts = PipelineOptions {
        k: cfg.k_examples,
        token_budget: cfg.token_budget,
        policy: CallPolicy::with_extra(cfg.allowlist_extra.clone()),
        retry: cfg.retry,
    };
    let parallelize = |name: &str, src: &str| -> Result<String, String> {
        let out = parallelize_source(src, name, &corpus, backend.as_ref(), &opts).map_err(|e| e.to_string())?;
        if out.injected() == 0 {
            let rejected = out.analysis.verdicts.iter().filter(|v| !v.is_parallelizable()).count();
            return Err(format!(
                "no directive injected ({} of {} loop(s) rejected by analysis, {} plan(s) rejected)",
                rejected,
                out.analysis.verdicts.len(),
                out.eligible()
            ));
        }
        Ok(out.output_text)
    };
    let tmp;
    let work = match &args.work_dir {
        Some(w) => w.clone(),
        None => match tempfile::tempdir() {
            Ok(t) => {
                tmp = t;
                tmp.path().to_path_buf()
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        },
    };
    let bc = BenchConfig {
        toolchain: hs.toolchain,
        repeats: hs.repeats,
        threads: hs.threads,
        timeout: Duration::from_secs(hs.timeout_s),
        tolerance: Tolerance::default(),
    };
    let report = match with_pool(cfg.jobs, || run_bench(&kernels, &bc, &work, &parallelize)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let (text, json) = speedup_table(&report);
    print!("{text}");
    if let Some(p) = &cfg.report_path {
        if let Err(e) = std::fs::write(p, json + "\n") {
            eprintln!("error: {}: {e}", p.display());
            return EXIT_INPUT;
        }
    }
    EXIT_OK
}

fn cmd_corpus_list(corpus: Option<PathBuf>) -> i32 {
    match load_corpus_at(corpus.as_deref()) {
        Ok(c) => {
            for e in &c.examples {
                let tags: Vec<&str> = e.pattern_tags.iter().map(|t| t.as_str()).collect();
                println!("{}\t{}", e.id, tags.join(","));
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Parallelize(a) => cmd_parallelize(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Corpus {
            command: CorpusCommand::List { corpus },
        } => cmd_corpus_list(corpus),
    }
}
