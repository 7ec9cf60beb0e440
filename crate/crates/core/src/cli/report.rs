//! The machine-readable run report. Key order follows field order.

use serde::Serialize;

use crate::pipeline::{LoopReport, SkippedReport};
use crate::rewriter::Injection;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub report_version: u32,
    pub command: &'static str,
    pub files: Vec<FileReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Ok,
    InputError,
    BackendError,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    pub file: String,
    pub status: FileStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub loops: Vec<LoopReport>,
    pub skipped: Vec<SkippedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub injected_at: Option<Vec<Injection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<String>,
}

impl FileReport {
    pub fn error(file: &str, status: FileStatus, message: String) -> FileReport {
        FileReport {
            file: file.to_string(),
            status,
            error: Some(message),
            output: None,
            loops: Vec::new(),
            skipped: Vec::new(),
            injected_at: None,
            diff: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub files: usize,
    pub loops: usize,
    pub parallelizable: usize,
    pub eligible: usize,
    pub injected: usize,
    pub exit_code: i32,
}
