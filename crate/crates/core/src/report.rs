//! Verdict-carrying reports shared by the verification checks.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// Holds only under a hypothesis the input does not certify.
    #[serde(rename = "conditional")]
    Conditional,
    #[serde(rename = "insufficient data")]
    InsufficientData,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<String>,
    pub details: Value,
}

impl Report {
    pub fn new(check: &str, verdict: Verdict, details: Value) -> Self {
        Report { check: check.into(), verdict, hypotheses: Vec::new(), details }
    }

    /// Records an unverified hypothesis; a pass becomes conditional.
    pub fn assume(mut self, hypothesis: impl Into<String>) -> Self {
        self.hypotheses.push(hypothesis.into());
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Conditional;
        }
        self
    }
}
