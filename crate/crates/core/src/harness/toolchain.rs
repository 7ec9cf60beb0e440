//! External compiler invocation.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::Command;

use super::HarnessError;

pub const DEFAULT_OMP_FLAG: &str = "-fopenmp";
/// Environment variable holding a toolchain template.
pub const TOOLCHAIN_ENV: &str = "OMPAR_TOOLCHAIN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Sequential,
    OpenMp,
}

/// A compiler command line with `{input}`, `{output}` and `{ompflag}`
/// placeholders, e.g. `gcc -O2 {ompflag} {input} -o {output} -lm`.
///
/// The template is split on whitespace; paths with spaces are not supported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toolchain {
    pub template: String,
    #[serde(default = "default_omp_flag")]
    pub omp_flag: String,
}

fn default_omp_flag() -> String {
    DEFAULT_OMP_FLAG.to_string()
}

impl Toolchain {
    pub fn new(template: &str) -> Toolchain {
        Toolchain {
            template: template.to_string(),
            omp_flag: default_omp_flag(),
        }
    }

    /// Template from [`TOOLCHAIN_ENV`], if set and nonempty.
    pub fn from_env() -> Option<Toolchain> {
        std::env::var(TOOLCHAIN_ENV)
            .ok()
            .filter(|t| !t.trim().is_empty())
            .map(|t| Toolchain::new(&t))
    }

    /// `gcc` with `-O2` if it is on `PATH` and accepts the OpenMP flag.
    pub fn detect_gcc() -> Option<Toolchain> {
        let ok = Command::new("gcc")
            .args(["-fopenmp", "-E", "-x", "c", "/dev/null", "-o", "/dev/null"])
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false);
        ok.then(|| Toolchain::new("gcc -O2 {ompflag} {input} -o {output} -lm"))
    }

    pub fn command_line(&self, input: &Path, output: &Path, variant: Variant) -> Vec<String> {
        let flag = match variant {
            Variant::Sequential => "",
            Variant::OpenMp => self.omp_flag.as_str(),
        };
        self.template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{input}", &input.to_string_lossy())
                    .replace("{output}", &output.to_string_lossy())
                    .replace("{ompflag}", flag)
            })
            .filter(|t| !t.is_empty())
            .collect()
    }
}

/// Compile `source` to `output`.
pub fn compile(
    source: &Path,
    variant: Variant,
    toolchain: Option<&Toolchain>,
    output: &Path,
) -> Result<PathBuf, HarnessError> {
    let tc = toolchain.ok_or_else(|| HarnessError::ToolchainMissing("no toolchain configured".into()))?;
    let argv = tc.command_line(source, output, variant);
    let (prog, args) = argv
        .split_first()
        .ok_or_else(|| HarnessError::ToolchainMissing("empty toolchain template".into()))?;
    let out = Command::new(prog).args(args).output().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => HarnessError::ToolchainMissing(format!("`{prog}` not found")),
        _ => HarnessError::Io(format!("running `{prog}`: {e}")),
    })?;
    if !out.status.success() || !output.exists() {
        return Err(HarnessError::CompileFailed {
            stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        });
    }
    Ok(output.to_path_buf())
}
