mod common;

use common::{corpus_dir, fixture_path, ompar_bin};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

const ENV_VARS: &[&str] = &[
    "OMPAR_BACKEND",
    "OMPAR_ENDPOINT",
    "OMPAR_MODEL",
    "OMPAR_API_KEY_ENV",
    "OMPAR_CORPUS",
    "OMPAR_K",
    "OMPAR_BUDGET",
    "OMPAR_CONFIG",
    "OMPAR_JOBS",
    "OMPAR_TOOLCHAIN",
];

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}\n{}", self.stdout))
    }
}

fn ompar(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(ompar_bin());
    cmd.args(args);
    for v in ENV_VARS {
        cmd.env_remove(v);
    }
    cmd.envs(env.iter().copied());
    let out = cmd.output().expect("spawn ompar");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Copies of fixtures in a scratch directory.
fn scratch(names: &[&str]) -> (tempfile::TempDir, Vec<PathBuf>) {
    let dir = tempfile::tempdir().unwrap();
    let paths = names
        .iter()
        .map(|n| {
            let p = dir.path().join(format!("{n}.c"));
            std::fs::copy(fixture_path(n), &p).unwrap();
            p
        })
        .collect();
    (dir, paths)
}

fn pragma_lines(text: &str) -> usize {
    text.lines()
        .filter(|l| l.trim_start().starts_with("#pragma omp"))
        .count()
}

#[test]
fn analyze_vector_add() {
    let r = ompar(&["analyze", s(&fixture_path("vector_add"))], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    let loops = v["files"][0]["loops"].as_array().unwrap();
    assert_eq!(loops.len(), 1);
    assert_eq!(loops[0]["verdict"]["status"], "parallelizable");
    assert_eq!(v["summary"]["parallelizable"], 1);
}

#[test]
fn analyze_prefix_sum_is_rejected_but_succeeds() {
    let r = ompar(&["analyze", s(&fixture_path("prefix_sum"))], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    let verdict = &v["files"][0]["loops"][0]["verdict"];
    assert_eq!(verdict["status"], "rejected");
    let codes: Vec<&str> = verdict["reasons"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap())
        .collect();
    assert!(codes.contains(&"CarriedFlowDep"), "{codes:?}");
}

#[test]
fn analyze_malformed_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.c");
    std::fs::write(&bad, "void f(int n) {\n    for (i = 0; i < n; i++ {\n}\n").unwrap();
    let r = ompar(&["analyze", s(&bad)], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.c"), "{}", r.stderr);
    let missing = ompar(&["analyze", s(&dir.path().join("nope.c"))], &[]);
    assert_eq!(missing.code, 2);
}

#[test]
fn parallelize_vector_add_writes_sibling() {
    let (_dir, paths) = scratch(&["vector_add"]);
    let r = ompar(&["parallelize", s(&paths[0])], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = paths[0].with_extension("omp.c");
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(pragma_lines(&text), 1);
    assert_eq!(
        std::fs::read_to_string(&paths[0]).unwrap(),
        std::fs::read_to_string(fixture_path("vector_add")).unwrap()
    );
    let v = r.json();
    assert_eq!(v["summary"]["injected"], 1);
    assert_eq!(v["files"][0]["output"], s(&out));
}

#[test]
fn parallelize_printf_loop_is_untouched() {
    let (_dir, paths) = scratch(&["printf_loop"]);
    let r = ompar(&["parallelize", s(&paths[0])], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["summary"]["injected"], 0);
    assert_eq!(v["summary"]["eligible"], 0);
    assert!(v.to_string().contains("IoCall"));
    let out = std::fs::read_to_string(paths[0].with_extension("omp.c")).unwrap();
    assert_eq!(out, std::fs::read_to_string(&paths[0]).unwrap());
}

#[test]
fn parallelize_in_place_and_stdout() {
    let (_dir, paths) = scratch(&["saxpy", "dot_product"]);
    let r = ompar(&["parallelize", "--stdout", s(&paths[0])], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(pragma_lines(&r.stdout), 1);
    assert!(!paths[0].with_extension("omp.c").exists());

    let r = ompar(&["parallelize", "--in-place", s(&paths[1])], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&paths[1]).unwrap();
    assert!(text.contains("reduction(+:s)"), "{text}");
    assert!(!paths[1].with_extension("omp.c").exists());
}

#[test]
fn reports_are_byte_stable() {
    let names = ["vector_add", "dot_product", "matmul", "histogram"];
    let (dir, paths) = scratch(&names);
    let mut args = vec!["parallelize", "--stdout", "--report"];
    let rep = dir.path().join("r.json");
    args.push(s(&rep));
    args.extend(paths.iter().map(|p| s(p)));
    let a = ompar(&args, &[]);
    let ra = std::fs::read(&rep).unwrap();
    let b = ompar(&args, &[]);
    let rb = std::fs::read(&rep).unwrap();
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(ra, rb);

    let mut an = vec!["analyze", "--jobs", "3"];
    an.extend(paths.iter().map(|p| s(p)));
    assert_eq!(ompar(&an, &[]).stdout, ompar(&an, &[]).stdout);
}

#[test]
fn bench_without_toolchain_skips() {
    let r = ompar(&["bench"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("SKIPPED"), "{}", r.stdout);
}

#[test]
fn bench_compile_failure_keeps_other_rows() {
    if ompar::harness::Toolchain::detect_gcc().is_none() {
        eprintln!("skipped: no toolchain");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("kernels");
    std::fs::create_dir(&k).unwrap();
    std::fs::write(
        k.join("fill.c"),
        "#include <stdio.h>\n\ndouble a[1000];\n\nint main(void) {\n    int i;\n    double s;\n    for (i = 0; i < 1000; i++)\n        a[i] = 2.0 * i;\n    s = 0.0;\n    for (i = 0; i < 1000; i++)\n        s += a[i];\n    printf(\"%f\\n\", s);\n    return 0;\n}\n",
    )
    .unwrap();
    std::fs::write(k.join("broken.c"), "int main(void) { return undeclared; }\n").unwrap();
    let rep = dir.path().join("bench.json");
    let r = ompar(
        &[
            "bench",
            s(&k),
            "--toolchain",
            "gcc -O2 {ompflag} {input} -o {output} -lm",
            "--repeats",
            "3",
            "--threads",
            "2",
            "--report",
            s(&rep),
        ],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1, "{v}");
    assert_eq!(rows[0]["name"], "fill");
    assert_eq!(rows[0]["outputs_match"], true);
    let omitted = v["omitted"].as_array().unwrap();
    assert_eq!(omitted.len(), 1);
    assert_eq!(omitted[0]["name"], "broken");
    assert!(r.stdout.contains("broken omitted"), "{}", r.stdout);
}

#[test]
fn corpus_listing() {
    let r = ompar(&["corpus", "list"], &[]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().count() >= 10);
    assert!(r.stdout.lines().all(|l| l.split('\t').count() == 2));
    let ondisk = ompar(&["corpus", "list", "--corpus", s(&corpus_dir())], &[]);
    assert_eq!(ondisk.stdout, r.stdout);

    let empty = tempfile::tempdir().unwrap();
    let r = ompar(&["corpus", "list", "--corpus", s(empty.path())], &[]);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));

    std::fs::write(empty.path().join("broken.icl"), "--- id: x\nnot a section\n").unwrap();
    let r = ompar(&["corpus", "list", "--corpus", s(empty.path())], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.icl"), "{}", r.stderr);
}

#[test]
fn config_precedence() {
    let (dir, paths) = scratch(&["vector_add"]);
    let cfg = dir.path().join("ompar.toml");
    std::fs::write(&cfg, "output_mode = \"stdout\"\n\n[backend]\nkind = \"remote\"\n").unwrap();
    let file = s(&paths[0]);

    // file alone: remote without an endpoint is a config error
    let r = ompar(&["parallelize", "--config", s(&cfg), file], &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    // environment beats the file
    let r = ompar(
        &["parallelize", file],
        &[("OMPAR_CONFIG", s(&cfg)), ("OMPAR_BACKEND", "offline")],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(pragma_lines(&r.stdout), 1);
    assert!(!paths[0].with_extension("omp.c").exists());
    // flags beat the environment
    let r = ompar(
        &["parallelize", "--backend", "offline", "--in-place", file],
        &[("OMPAR_CONFIG", s(&cfg)), ("OMPAR_BACKEND", "remote")],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(pragma_lines(&std::fs::read_to_string(&paths[0]).unwrap()), 1);

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    let r = ompar(&["analyze", "--config", s(&cfg), file], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("colour"), "{}", r.stderr);
}
