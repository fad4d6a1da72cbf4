//! Flat key:value reports with stable key ordering, and the shared numeric
//! formatting (17 significant digits) used by every artifact writer.

use num_complex::Complex64;
use std::fmt::Write as _;

/// 17 significant digits; round-trips f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt17c(z: Complex64) -> String {
    format!("{} {}", fmt17(z.re), fmt17(z.im))
}

/// One verification record: a named check with its measurement and threshold.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub id: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
}

/// Ordered key:value report; rendering is byte-stable for identical content.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub entries: Vec<(String, String)>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn put_f64(&mut self, key: &str, value: f64) {
        self.put(key, fmt17(value));
    }

    pub fn check(&mut self, id: &str, passed: bool, measured: f64, threshold: f64, note: &str) {
        self.checks.push(CheckRecord {
            id: id.to_string(),
            passed,
            measured,
            threshold,
            note: note.to_string(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}: {v}");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "check.{}: {} measured={} threshold={} {}",
                c.id,
                if c.passed { "pass" } else { "FAIL" },
                fmt17(c.measured),
                fmt17(c.threshold),
                c.note
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_passed() { "pass" } else { "FAIL" }
        );
        out
    }
}
