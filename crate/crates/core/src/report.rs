//! Uniform record of one inequality check.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Statistical uncertainty straddles zero margin.
    Inconclusive,
    /// Estimator unreliable (low effective sample size or heavy tail).
    Unreliable,
    /// The scenario predicts failure and failure was observed.
    ExpectedFail,
    /// The scenario predicts failure but the check passed.
    UnexpectedPass,
    /// Preconditions not met; nothing was checked.
    Skipped,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Unreliable => "unreliable",
            Verdict::ExpectedFail => "expected_fail",
            Verdict::UnexpectedPass => "unexpected_pass",
            Verdict::Skipped => "skipped",
        }
    }

    /// Whether the verdict counts towards a successful run.
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::ExpectedFail | Verdict::Skipped)
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Applies an expected-failure marker.
    pub fn expecting_failure(self, expected: bool) -> Self {
        match (expected, self) {
            (true, Verdict::Fail) => Verdict::ExpectedFail,
            (true, Verdict::Pass) => Verdict::UnexpectedPass,
            (_, v) => v,
        }
    }

    /// Three-way verdict for a margin with standard error `se`.
    pub fn from_margin(margin: f64, se: f64, z: f64) -> Self {
        if margin - z * se > 0.0 {
            Verdict::Pass
        } else if margin + z * se < 0.0 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

/// `lhs ≤ rhs` checked numerically; `margin = rhs - lhs` unless stated
/// otherwise by the producing check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_id: String,
    pub scenario: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub fitted: Vec<(String, f64)>,
    pub verdict: Verdict,
    pub note: String,
}

impl VerificationReport {
    pub fn new(check_id: impl Into<String>, lhs: f64, rhs: f64, verdict: Verdict) -> Self {
        let margin = rhs - lhs;
        Self {
            check_id: check_id.into(),
            scenario: String::new(),
            lhs,
            rhs,
            margin,
            ci_low: margin,
            ci_high: margin,
            fitted: Vec::new(),
            verdict,
            note: String::new(),
        }
    }

    pub fn with_margin(mut self, margin: f64, half_width: f64) -> Self {
        self.margin = margin;
        self.ci_low = margin - half_width;
        self.ci_high = margin + half_width;
        self
    }

    pub fn with_fitted(mut self, name: impl Into<String>, value: f64) -> Self {
        self.fitted.push((name.into(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_scenario(mut self, scenario: impl Into<String>) -> Self {
        self.scenario = scenario.into();
        self
    }
}
