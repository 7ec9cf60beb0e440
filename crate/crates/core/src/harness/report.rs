//! Speedup table rendering.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::TimingStats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub sequential: TimingStats,
    pub parallel: TimingStats,
    /// Ratio of medians.
    pub speedup: f64,
    pub outputs_match: bool,
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

/// A kernel with no timed parallel variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmittedRow {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub omitted: Vec<OmittedRow>,
}

impl BenchReport {
    /// Add a row; a missing or empty parallel measurement turns it into a note.
    pub fn add(
        &mut self,
        name: &str,
        sequential: TimingStats,
        parallel: Option<TimingStats>,
        outputs_match: bool,
        threads: usize,
        mismatch: Option<String>,
    ) {
        match parallel.filter(|p| p.runs > 0) {
            Some(parallel) => self.rows.push(BenchRow {
                name: name.to_string(),
                speedup: sequential.median_s / parallel.median_s.max(f64::MIN_POSITIVE),
                sequential,
                parallel,
                outputs_match,
                threads,
                mismatch,
            }),
            None => self.omit(name, "no parallel timing"),
        }
    }

    pub fn omit(&mut self, name: &str, reason: &str) {
        self.omitted.push(OmittedRow {
            name: name.to_string(),
            reason: reason.to_string(),
        });
    }

    pub fn row(&self, name: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Text table plus its JSON mirror.
pub fn speedup_table(report: &BenchReport) -> (String, String) {
    let width = report
        .rows
        .iter()
        .map(|r| r.name.len())
        .chain(report.omitted.iter().map(|r| r.name.len()))
        .chain(std::iter::once("kernel".len()))
        .max()
        .unwrap_or(6);
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<width$}  {:>12}  {:>12}  {:>8}  {:>7}  outputs_match",
        "kernel", "sequential_s", "parallel_s", "speedup", "threads"
    );
    for r in &report.rows {
        let _ = writeln!(
            t,
            "{:<width$}  {:>12.6}  {:>12.6}  {:>8.2}  {:>7}  {}",
            r.name,
            r.sequential.median_s,
            r.parallel.median_s,
            r.speedup,
            r.threads,
            if r.outputs_match { "yes" } else { "FAILED" }
        );
    }
    for o in &report.omitted {
        let _ = writeln!(t, "note: {} omitted: {}", o.name, o.reason);
    }
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    (t, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(m: f64) -> TimingStats {
        TimingStats {
            runs: 3,
            median_s: m,
            mean_s: m,
            stddev_s: 0.0,
            min_s: m,
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let mut r = BenchReport::default();
        r.add("matmul", stats(2.0), Some(stats(1.0)), true, 4, None);
        r.add("dot", stats(1.0), Some(stats(1.0)), false, 4, Some("token 0".into()));
        r.add("jacobi", stats(1.0), None, true, 4, None);
        r.omit("histogram", "no directive injected");
        assert_eq!(r.rows[0].speedup, 2.0);
        let (text, json) = speedup_table(&r);
        assert_eq!(
            text,
            "kernel     sequential_s    parallel_s   speedup  threads  outputs_match\n\
             matmul         2.000000      1.000000      2.00        4  yes\n\
             dot            1.000000      1.000000      1.00        4  FAILED\n\
             note: jacobi omitted: no parallel timing\n\
             note: histogram omitted: no directive injected\n"
        );
        assert_eq!(speedup_table(&r), (text, json.clone()));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"][0]["speedup"], 2.0);
        assert_eq!(v["omitted"][1]["name"], "histogram");
    }
}
