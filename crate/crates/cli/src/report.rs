//! Report assembly and printing.
//!
//! Structured output is JSON with a stable field order and no wall time, so
//! identical config and seed produce byte-identical reports; the human
//! format adds timing.

use serde::Serialize;
use serde_json::Value;

use residuated::report::{CheckStatus, LawReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisUnmet,
}

impl From<CheckStatus> for Status {
    fn from(s: CheckStatus) -> Status {
        match s {
            CheckStatus::Pass => Status::Pass,
            CheckStatus::Fail => Status::Fail,
            CheckStatus::HypothesisUnmet => Status::HypothesisUnmet,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    /// Arguments that re-run this check in isolation (`resw replay`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Vec<String>>,
}

impl CheckOut {
    pub fn pass(name: impl Into<String>) -> CheckOut {
        CheckOut { name: name.into(), status: Status::Pass, counterexample: None, replay: None }
    }

    pub fn fail(name: impl Into<String>, counterexample: Value) -> CheckOut {
        CheckOut {
            name: name.into(),
            status: Status::Fail,
            counterexample: Some(counterexample),
            replay: None,
        }
    }

    pub fn unmet(name: impl Into<String>, note: Value) -> CheckOut {
        CheckOut {
            name: name.into(),
            status: Status::HypothesisUnmet,
            counterexample: Some(note),
            replay: None,
        }
    }

    pub fn with_replay(mut self, argv: Vec<String>) -> CheckOut {
        self.replay = Some(argv);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub checks: Vec<CheckOut>,
    pub status: Status,
    /// Free-form structured payload (level sizes, emitted algebras, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, seed: u64) -> Report {
        Report {
            command: command.to_string(),
            config,
            seed,
            checks: Vec::new(),
            status: Status::Pass,
            output: None,
        }
    }

    pub fn push(&mut self, check: CheckOut) {
        if check.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn absorb_laws(&mut self, report: &LawReport) {
        for law in &report.checks {
            self.push(CheckOut {
                name: law.law.clone(),
                status: law.status.into(),
                counterexample: law.counterexample.clone().map(Value::String),
                replay: None,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn render_text(&self, wall: std::time::Duration) -> String {
        let mut out = String::new();
        for check in &self.checks {
            let tag = match check.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::HypothesisUnmet => "SKIP",
            };
            out.push_str(&format!("[{tag}] {}\n", check.name));
            if let Some(ce) = &check.counterexample {
                out.push_str(&format!("       {ce}\n"));
            }
            if let Some(replay) = &check.replay {
                out.push_str(&format!("       replay: resw {}\n", replay.join(" ")));
            }
        }
        if let Some(output) = &self.output {
            out.push_str(&format!("{}\n", serde_json::to_string_pretty(output).unwrap()));
        }
        let verdict = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisUnmet => "hypothesis-unmet",
        };
        out.push_str(&format!(
            "{}: {} ({} checks, {:.2}s, seed {})\n",
            self.command,
            verdict,
            self.checks.len(),
            wall.as_secs_f64(),
            self.seed
        ));
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
