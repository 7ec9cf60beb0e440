//! Numeric-tolerant output comparison.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-6, abs: 1e-9 }
    }
}

fn tokens_match(a: &str, b: &str, tol: &Tolerance) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => {
            if !x.is_finite() || !y.is_finite() {
                return false;
            }
            let d = (x - y).abs();
            d <= tol.abs || d <= tol.rel * x.abs().max(y.abs())
        }
        _ => false,
    }
}

/// First mismatching token pair, described; `None` when the outputs agree.
pub fn output_mismatch(seq: &str, par: &str, tol: &Tolerance) -> Option<String> {
    let a: Vec<&str> = seq.split_whitespace().collect();
    let b: Vec<&str> = par.split_whitespace().collect();
    if let Some(i) = (0..a.len().min(b.len())).find(|&i| !tokens_match(a[i], b[i], tol)) {
        return Some(format!("token {i}: sequential `{}` vs parallel `{}`", a[i], b[i]));
    }
    (a.len() != b.len()).then(|| format!("token count: sequential {} vs parallel {}", a.len(), b.len()))
}

/// Token-wise comparison; numbers within `tol`, everything else byte-equal.
pub fn compare_outputs(seq: &str, par: &str, tol: &Tolerance) -> bool {
    output_mismatch(seq, par, tol).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules() {
        let t = Tolerance::default();
        assert!(compare_outputs("sum 1.5\n2", "sum  1.5 2\n", &t));
        assert!(compare_outputs("1.0000001", "1.0", &t));
        assert!(!compare_outputs("1.00001", "1.0", &t));
        assert!(!compare_outputs("nan", "1.0", &t));
        assert!(compare_outputs("1e-12", "-1e-12", &t));
        assert!(!compare_outputs("ok", "OK", &t));
        assert!(!compare_outputs("1 2", "1", &t));
        assert_eq!(
            output_mismatch("a 1 2", "a 1 3", &t).as_deref(),
            Some("token 2: sequential `2` vs parallel `3`")
        );
    }
}
