//! Layered run configuration: flags, then environment, then file, then defaults.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::backend::{BackendConfig, BackendKind};
use crate::harness::{Toolchain, DEFAULT_OMP_FLAG, DEFAULT_REPEATS, DEFAULT_TIMEOUT};
use crate::prompting::{DEFAULT_K, DEFAULT_TOKEN_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    /// `<name>.omp.c` next to the input.
    #[default]
    Sibling,
    InPlace,
    Stdout,
}

/// `[harness]` table of the config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessFile {
    pub toolchain: Option<String>,
    pub omp_flag: Option<String>,
    pub repeats: Option<u32>,
    pub threads: Option<usize>,
    pub timeout_s: Option<u64>,
}

/// The TOML config file. Every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<BackendConfig>,
    pub corpus: Option<PathBuf>,
    pub k: Option<usize>,
    pub token_budget: Option<usize>,
    pub allowlist_extra: Vec<String>,
    pub jobs: Option<usize>,
    pub retry: Option<bool>,
    pub output_mode: Option<OutputMode>,
    pub harness: HarnessFile,
}

impl FileConfig {
    /// Parse `path`; relative paths inside are resolved against its directory.
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.corpus = cfg.corpus.map(|c| if c.is_relative() { base.join(c) } else { c });
        Ok(cfg)
    }
}

/// Values given on the command line or through the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub backend: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub corpus: Option<PathBuf>,
    pub k: Option<usize>,
    pub token_budget: Option<usize>,
    pub allow: Vec<String>,
    pub jobs: Option<usize>,
    pub retry: bool,
    pub output_mode: Option<OutputMode>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub backend: BackendConfig,
    /// `None` selects the bundled corpus.
    pub corpus_path: Option<PathBuf>,
    pub k_examples: usize,
    pub token_budget: usize,
    pub allowlist_extra: Vec<String>,
    pub output_mode: OutputMode,
    pub report_path: Option<PathBuf>,
    pub jobs: usize,
    pub retry: bool,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, o: Overrides) -> Result<RunConfig, String> {
        let mut backend = file.backend.unwrap_or_default();
        if let Some(k) = o.backend {
            backend.kind = k;
        }
        if o.endpoint.is_some() {
            backend.endpoint_url = o.endpoint;
        }
        if let Some(m) = o.model {
            backend.model_name = m;
        }
        if let Some(e) = o.api_key_env {
            backend.api_key_env = e;
        }
        backend.validate()?;
        let mut allow = file.allowlist_extra;
        allow.extend(o.allow);
        allow.sort();
        allow.dedup();
        let cfg = RunConfig {
            backend,
            corpus_path: o.corpus.or(file.corpus),
            k_examples: o.k.or(file.k).unwrap_or(DEFAULT_K),
            token_budget: o.token_budget.or(file.token_budget).unwrap_or(DEFAULT_TOKEN_BUDGET),
            allowlist_extra: allow,
            output_mode: o.output_mode.or(file.output_mode).unwrap_or_default(),
            report_path: o.report,
            jobs: o.jobs.or(file.jobs).unwrap_or_else(crate::harness::default_threads),
            retry: o.retry || file.retry.unwrap_or(false),
        };
        if cfg.token_budget == 0 {
            return Err("token budget must be > 0".into());
        }
        if cfg.jobs == 0 {
            return Err("jobs must be >= 1".into());
        }
        Ok(cfg)
    }
}

/// Harness settings after layering.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessSettings {
    pub toolchain: Option<Toolchain>,
    pub repeats: u32,
    pub threads: Option<usize>,
    pub timeout_s: u64,
}

impl HarnessSettings {
    pub fn resolve(
        file: &HarnessFile,
        toolchain: Option<String>,
        repeats: Option<u32>,
        threads: Option<usize>,
        timeout_s: Option<u64>,
    ) -> HarnessSettings {
        let toolchain = toolchain
            .or_else(|| file.toolchain.clone())
            .filter(|t| !t.trim().is_empty())
            .map(|t| Toolchain {
                template: t,
                omp_flag: file.omp_flag.clone().unwrap_or_else(|| DEFAULT_OMP_FLAG.to_string()),
            });
        HarnessSettings {
            toolchain,
            repeats: repeats.or(file.repeats).unwrap_or(DEFAULT_REPEATS),
            threads: threads.or(file.threads),
            timeout_s: timeout_s.or(file.timeout_s).unwrap_or(DEFAULT_TIMEOUT.as_secs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: FileConfig = toml::from_str(
            r#"
            k = 5
            token_budget = 100
            allowlist_extra = ["helper"]
            [backend]
            kind = "remote"
            endpoint_url = "http://file"
            model_name = "file-model"
            "#,
        )
        .unwrap();
        let cfg = RunConfig::resolve(
            file.clone(),
            Overrides {
                model: Some("flag-model".into()),
                k: Some(1),
                allow: vec!["other".into()],
                jobs: Some(2),
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.backend.kind, BackendKind::Remote);
        assert_eq!(cfg.backend.endpoint_url.as_deref(), Some("http://file"));
        assert_eq!(cfg.backend.model_name, "flag-model");
        assert_eq!(cfg.k_examples, 1);
        assert_eq!(cfg.token_budget, 100);
        assert_eq!(cfg.allowlist_extra, ["helper", "other"]);

        let d = RunConfig::resolve(FileConfig::default(), Overrides::default()).unwrap();
        assert_eq!(d.backend, BackendConfig::default());
        assert_eq!(
            (d.k_examples, d.token_budget, d.output_mode),
            (DEFAULT_K, DEFAULT_TOKEN_BUDGET, OutputMode::Sibling)
        );
    }

    #[test]
    fn invalid_values() {
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        let o = Overrides {
            backend: Some(BackendKind::Remote),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(FileConfig::default(), o).is_err());
        let o = Overrides {
            token_budget: Some(0),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(FileConfig::default(), o).is_err());
    }

    #[test]
    fn harness_layering() {
        let f = HarnessFile {
            toolchain: Some("cc {input} -o {output}".into()),
            repeats: Some(4),
            ..HarnessFile::default()
        };
        let h = HarnessSettings::resolve(&f, None, Some(3), None, None);
        assert_eq!(h.repeats, 3);
        assert_eq!(h.toolchain.unwrap().omp_flag, DEFAULT_OMP_FLAG);
        assert_eq!(h.timeout_s, 300);
        assert!(
            HarnessSettings::resolve(&HarnessFile::default(), Some(" ".into()), None, None, None)
                .toolchain
                .is_none()
        );
    }
}
