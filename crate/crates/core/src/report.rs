//! Check reports and the provenance header carried by every output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions of the check did not hold; not a failure.
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    /// Largest observed deviation from the target; its meaning depends on the check.
    pub residual: f64,
    /// Index range the check looked at, when it is a windowed check.
    pub window: Option<[u128; 2]>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, pass: bool, residual: f64) -> Self {
        CheckReport {
            check: check.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            residual,
            window: None,
            detail: String::new(),
        }
    }

    pub fn skip(check: impl Into<String>, why: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            status: Status::Skip,
            residual: 0.0,
            window: None,
            detail: why.into(),
        }
    }

    /// Passes when `residual <= tol`.
    pub fn within(check: impl Into<String>, residual: f64, tol: f64) -> Self {
        let mut r = CheckReport::new(check, residual <= tol, residual);
        r.detail = format!("tolerance {tol:e}");
        r
    }

    pub fn with_window(mut self, lo: u128, hi: u128) -> Self {
        self.window = Some([lo, hi]);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Tool version, seed and parameters of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        let mut params = BTreeMap::new();
        params.insert("command".to_string(), command.to_string());
        Provenance {
            tool: "tmlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: None,
            params,
        }
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// `# key=value` lines that precede the CSV header.
    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool={} version={}", self.tool, self.version);
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "# seed={s}");
            }
            None => out.push_str("# seed=none\n"),
        }
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }
}

/// Machine-readable verification output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub provenance: Provenance,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(provenance: Provenance, checks: Vec<CheckReport>) -> Self {
        let passed = checks.iter().all(CheckReport::passed);
        VerifyReport {
            provenance,
            checks,
            passed,
        }
    }
}

/// Shortest round-trip decimal form, so reruns print identical bytes.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = CheckReport::within("x", 1e-13, 1e-12).with_window(3, 9);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["window"][1], 9);
        let back: CheckReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        assert!(!CheckReport::within("y", 1.0, 0.5).passed());
        assert!(CheckReport::skip("z", "n/a").passed());
    }

    #[test]
    fn provenance_lines() {
        let p = Provenance::new("spectrum").seed(Some(4)).param("q", 11);
        let h = p.csv_header();
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# seed=4") && h.contains("# q=11"));
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(1e-300), "1e-300");
    }
}
