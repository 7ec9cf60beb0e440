//! Scripted remote responses and the behaviour each must produce.

use ompar::backend::stub::{StubReply, StubServer};
use ompar::backend::{BackendConfig, BackendError, BackendKind, RemoteBackend};
use ompar::pipeline::{parallelize_source, LoopStatus, PipelineError, PipelineOptions};
use ompar::prompting::IclCorpus;
use std::process::Command;

pub const KEY_ENV: &str = "OMPAR_STUB_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Injected,
    /// Plan rejected; the attempt error starts with this code.
    Rejected(&'static str),
    Transport,
}

impl Expected {
    pub fn exit_code(self) -> i32 {
        match self {
            Expected::Injected => 0,
            Expected::Rejected(_) => 3,
            Expected::Transport => 4,
        }
    }
}

pub struct Case {
    pub name: &'static str,
    pub reply: StubReply,
    pub expected: Expected,
}

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "well-formed",
            reply: StubReply::completion("Use this:\n```c\n#pragma omp parallel for\n```\n"),
            expected: Expected::Injected,
        },
        Case {
            name: "no directive",
            reply: StubReply::completion("This loop looks parallel to me."),
            expected: Expected::Rejected("NoDirectiveFound"),
        },
        Case {
            name: "simd",
            reply: StubReply::completion("#pragma omp simd"),
            expected: Expected::Rejected("UnsupportedConstruct"),
        },
        Case {
            name: "two directives",
            reply: StubReply::completion("#pragma omp parallel for\n#pragma omp parallel for private(i)"),
            expected: Expected::Rejected("MultipleDirectives"),
        },
        Case {
            name: "hangup",
            reply: StubReply::Hangup,
            expected: Expected::Transport,
        },
    ]
}

pub fn config(url: String) -> BackendConfig {
    BackendConfig {
        kind: BackendKind::Remote,
        endpoint_url: Some(url),
        timeout_s: 5,
        max_retries: 1,
        backoff_base_ms: 1,
        api_key_env: KEY_ENV.to_string(),
        ..BackendConfig::default()
    }
}

/// Library-level outcome for `source` against a stub answering `reply`.
pub fn check_library(case: &Case, source: &str) -> Result<(), String> {
    std::env::set_var(KEY_ENV, "stub-key");
    let server = StubServer::start(vec![case.reply.clone()]).map_err(|e| e.to_string())?;
    let backend = RemoteBackend::new(config(server.url())).map_err(|e| e.to_string())?;
    let got = parallelize_source(
        source,
        "input.c",
        &IclCorpus::bundled(),
        &backend,
        &PipelineOptions::default(),
    );
    let reqs = server.requests();
    if reqs.is_empty() {
        return Err("stub saw no request".into());
    }
    if reqs[0].header("authorization") != Some("Bearer stub-key") {
        return Err("missing bearer key".into());
    }
    match (case.expected, got) {
        (Expected::Transport, Err(PipelineError::Backend(BackendError::TransportError(_)))) => Ok(()),
        (Expected::Injected, Ok(out)) if out.injected() == 1 => Ok(()),
        (Expected::Rejected(code), Ok(out)) => {
            let o = out.outcomes.iter().flatten().next().ok_or("no eligible loop")?;
            let err = o.attempts.first().and_then(|a| a.error.clone()).unwrap_or_default();
            if o.status == LoopStatus::PlanRejected && err.starts_with(code) && out.injected_at.is_empty() {
                Ok(())
            } else {
                Err(format!("status {:?}, error `{err}`", o.status))
            }
        }
        (e, Ok(out)) => Err(format!("expected {e:?}, injected {}", out.injected())),
        (e, Err(err)) => Err(format!("expected {e:?}, got {err}")),
    }
}

/// Exit code of `ompar parallelize --backend remote --stdout` on `file`.
pub fn check_cli(case: &Case, bin: &std::path::Path, file: &std::path::Path) -> Result<(), String> {
    let server = StubServer::start(vec![case.reply.clone()]).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("ompar.toml");
    std::fs::write(&cfg, "[backend]\nmax_retries = 1\nbackoff_base_ms = 1\ntimeout_s = 5\n")
        .map_err(|e| e.to_string())?;
    let out = Command::new(bin)
        .arg("parallelize")
        .arg("--config")
        .arg(&cfg)
        .args(["--stdout", "--backend", "remote", "--endpoint"])
        .arg(server.url())
        .args(["--api-key-env", KEY_ENV])
        .arg(file)
        .env(KEY_ENV, "stub-key")
        .env_remove("OMPAR_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    if code == case.expected.exit_code() {
        Ok(())
    } else {
        Err(format!(
            "exit {code}, expected {}: {}",
            case.expected.exit_code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}
