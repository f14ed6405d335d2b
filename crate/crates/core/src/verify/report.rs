use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One violated contract inside a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: u64,
    pub input: Value,
    pub expected: String,
    pub observed: Value,
}

impl Failure {
    pub fn new(trial: u64, input: Value, expected: impl Into<String>, observed: Value) -> Self {
        Self {
            trial,
            input,
            expected: expected.into(),
            observed,
        }
    }
}

/// Outcome of a verification suite. Identical `(seed, trials)` give an
/// identical report apart from `elapsed_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub failures: Vec<Failure>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl SuiteReport {
    pub(crate) fn finish(
        suite: &str,
        seed: u64,
        trials: u64,
        mut failures: Vec<Failure>,
        metrics: Option<Value>,
        started: Instant,
    ) -> Self {
        failures.sort_by(|a, b| {
            (a.trial, &a.expected)
                .cmp(&(b.trial, &b.expected))
                .then_with(|| a.input.to_string().cmp(&b.input.to_string()))
        });
        Self {
            suite: suite.to_string(),
            seed,
            trials,
            pass: failures.is_empty(),
            failures,
            metrics,
            elapsed_ms: Some(started.elapsed().as_secs_f64() * 1e3),
        }
    }

    /// The report with run-dependent fields removed.
    pub fn deterministic(mut self) -> Self {
        self.elapsed_ms = None;
        self
    }

    pub fn to_json(&self, deterministic: bool) -> String {
        if deterministic {
            serde_json::to_string(&self.clone().deterministic())
        } else {
            serde_json::to_string(self)
        }
        .expect("reports serialize")
    }
}
