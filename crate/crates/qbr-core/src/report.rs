//! Check records and report assembly shared by the verification suites
//! and the CLI: named checks with pass/fail/skipped/inconclusive status,
//! optional witness payload, and wall time.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::QbrError;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Inconclusive,
}

/// What a single check produced. `Fail` payloads are machine-replayable
/// counterexamples: element indices plus the equation that broke.
#[derive(Clone, Debug)]
pub enum Outcome {
    Pass,
    /// Pass with measured-but-not-asserted data worth keeping.
    PassWith(Value),
    Fail(Value),
    Skipped(String),
    Inconclusive(Value),
}

impl Outcome {
    /// Pass/fail by predicate, with the payload kept on failure only.
    pub fn require(ok: bool, counterexample: impl FnOnce() -> Value) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(counterexample())
        }
    }
}

/// Errors that mean "this check does not apply here or exceeds a cap",
/// as opposed to a genuine verification failure.
pub fn error_downgrades_to_skip(e: &QbrError) -> bool {
    matches!(
        e,
        QbrError::OrderCapExceeded(_, _)
            | QbrError::ScaleCapExceeded(_)
            | QbrError::IdealCapExceeded(_)
            | QbrError::NonUnitalRing
            | QbrError::HypothesisFailed(_)
            | QbrError::NotExchange
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    /// What was examined: a ring label, a corpus name, or a demo name.
    pub subject: String,
    /// Construction recipe echo when the subject came from a spec file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub inconclusive: usize,
    pub all_ok: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Copy with all timing fields zeroed; two runs of the same subject
    /// and seed must agree on this view byte for byte.
    pub fn timeless(&self) -> Report {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.wall_ms = 0;
        }
        out
    }

    /// Plain-text summary table, one row per check.
    pub fn render_table(&self) -> String {
        let name_w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        out.push_str(&format!("{:<name_w$}  {:<12}  {:>8}\n", "name", "status", "ms"));
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
                Status::Inconclusive => "inconclusive",
            };
            out.push_str(&format!("{:<name_w$}  {:<12}  {:>8}\n", c.name, status, c.wall_ms));
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed, {} skipped, {} inconclusive\n",
            self.subject, self.passed, self.failed, self.skipped, self.inconclusive
        ));
        out
    }
}

pub struct ReportBuilder {
    subject: String,
    spec: Option<Value>,
    seed: Option<u64>,
    checks: Vec<CheckRecord>,
}

impl ReportBuilder {
    pub fn new(subject: impl Into<String>) -> Self {
        ReportBuilder { subject: subject.into(), spec: None, seed: None, checks: Vec::new() }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn spec_echo(mut self, spec: Value) -> Self {
        self.spec = Some(spec);
        self
    }

    /// Times `f` and records its outcome under `name`. Cap and
    /// hypothesis errors downgrade to Skipped; any other error fails the
    /// check with the error text as witness.
    pub fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> crate::error::Result<Outcome>) {
        let start = Instant::now();
        let outcome = match f() {
            Ok(o) => o,
            Err(e) if error_downgrades_to_skip(&e) => Outcome::Skipped(e.to_string()),
            Err(e) => Outcome::Fail(serde_json::json!({ "error": e.to_string() })),
        };
        let wall_ms = start.elapsed().as_millis() as u64;
        let (status, witness) = match outcome {
            Outcome::Pass => (Status::Pass, None),
            Outcome::PassWith(v) => (Status::Pass, Some(v)),
            Outcome::Fail(v) => (Status::Fail, Some(v)),
            Outcome::Skipped(reason) => (Status::Skipped, Some(Value::String(reason))),
            Outcome::Inconclusive(v) => (Status::Inconclusive, Some(v)),
        };
        self.checks.push(CheckRecord { name: name.into(), status, witness, wall_ms });
    }

    pub fn finish(self) -> Report {
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        let failed = count(Status::Fail);
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subject: self.subject,
            spec: self.spec,
            seed: self.seed,
            passed: count(Status::Pass),
            failed,
            skipped: count(Status::Skipped),
            inconclusive: count(Status::Inconclusive),
            all_ok: failed == 0,
            checks: self.checks,
        }
    }
}
