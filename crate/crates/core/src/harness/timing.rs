//! Child-process timing.

use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use wait_timeout::ChildExt;

use super::HarnessError;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);
pub const DEFAULT_REPEATS: u32 = 7;
pub const MIN_REPEATS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub runs: usize,
    pub median_s: f64,
    pub mean_s: f64,
    /// Sample standard deviation; 0 for a single run.
    pub stddev_s: f64,
    pub min_s: f64,
}

impl TimingStats {
    pub fn from_samples(samples: &[f64]) -> Option<TimingStats> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let median = if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        };
        let mean = s.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(TimingStats {
            runs: n,
            median_s: median,
            mean_s: mean,
            stddev_s: var.sqrt(),
            min_s: s[0],
        })
    }
}

#[derive(Debug, Clone)]
pub struct TimedRun {
    pub stats: TimingStats,
    /// Standard output of the last run.
    pub stdout: String,
    /// Every wall-clock sample, warm-up included.
    pub samples: Vec<f64>,
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> std::thread::JoinHandle<String> {
    std::thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut r) = r {
            let _ = r.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Run `binary` once; returns elapsed seconds and stdout.
pub fn run_once(
    binary: &Path,
    args: &[String],
    threads: Option<usize>,
    timeout: Duration,
) -> Result<(f64, String), HarnessError> {
    let mut cmd = Command::new(binary);
    cmd.args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(t) = threads {
        cmd.env("OMP_NUM_THREADS", t.to_string());
    }
    let start = Instant::now();
    let mut child = cmd
        .spawn()
        .map_err(|e| HarnessError::Io(format!("spawning {}: {e}", binary.display())))?;
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());
    let status = child
        .wait_timeout(timeout)
        .map_err(|e| HarnessError::Io(format!("waiting for {}: {e}", binary.display())))?;
    let elapsed = start.elapsed().as_secs_f64();
    let Some(status) = status else {
        let _ = child.kill();
        let _ = child.wait();
        return Err(HarnessError::Timeout {
            seconds: timeout.as_secs_f64(),
        });
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    if !status.success() {
        return Err(HarnessError::NonZeroExit {
            code: status.code(),
            stderr,
        });
    }
    Ok((elapsed, stdout))
}

/// Time `repeats` runs. With four or more, the first is a discarded warm-up.
pub fn run_and_time(
    binary: &Path,
    args: &[String],
    repeats: u32,
    threads: Option<usize>,
    timeout: Duration,
) -> Result<TimedRun, HarnessError> {
    if repeats < MIN_REPEATS {
        return Err(HarnessError::InvalidRepeats(repeats));
    }
    let mut samples = Vec::with_capacity(repeats as usize);
    let mut stdout = String::new();
    for _ in 0..repeats {
        let (t, out) = run_once(binary, args, threads, timeout)?;
        samples.push(t);
        stdout = out;
    }
    let counted = if repeats >= 4 { &samples[1..] } else { &samples[..] };
    let stats = TimingStats::from_samples(counted).expect("at least one counted run");
    Ok(TimedRun { stats, stdout, samples })
}
