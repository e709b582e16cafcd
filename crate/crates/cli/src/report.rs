//! Command results, rendered as a table or as a `kind = "report"` document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use superdatum::rootdatum::{BqrReport, Check, ClassicalReport, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub label: String,
    /// `pass`, `fail`, `skipped` or `info`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Finding {
    pub fn new(label: impl Into<String>, outcome: &str, detail: impl Into<String>) -> Self {
        Finding {
            label: label.into(),
            outcome: outcome.to_string(),
            detail: detail.into(),
        }
    }

    pub fn info(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Finding::new(label, "info", detail)
    }

    pub fn check(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Finding::new(label, if ok { "pass" } else { "fail" }, detail)
    }

    pub fn from_check(c: &Check) -> Self {
        match &c.outcome {
            Outcome::Pass => Finding::new(&c.label, "pass", ""),
            Outcome::Fail(w) => Finding::new(&c.label, "fail", w.clone()),
            Outcome::Skipped => Finding::new(&c.label, "skipped", ""),
        }
    }

    pub fn is_fail(&self) -> bool {
        self.outcome == "fail"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_mode: Option<String>,
    #[serde(default)]
    pub findings: Vec<Finding>,
    #[serde(default)]
    pub data: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: &str, subject: impl Into<String>) -> Self {
        Report {
            command: command.to_string(),
            subject: subject.into(),
            status: Status::Pass,
            span_mode: None,
            findings: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, f: Finding) {
        self.findings.push(f);
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.data.insert(key.to_string(), value.to_string());
    }

    pub fn add_classical(&mut self, r: &ClassicalReport) {
        self.findings
            .extend(r.checks.iter().map(Finding::from_check));
    }

    pub fn add_bqr(&mut self, r: &BqrReport) {
        self.span_mode = Some(r.mode.to_string());
        self.findings
            .extend(r.checks.iter().map(Finding::from_check));
        for n in &r.notes {
            self.push(Finding::info("note", n.clone()));
        }
        self.set("span_rank", r.span_rank);
        self.set("lattice_rank", r.lattice_rank);
        self.set("monodromy", r.monodromy);
    }

    /// Fails the report if any finding failed.
    pub fn settle(mut self) -> Self {
        if self.findings.iter().any(Finding::is_fail) {
            self.status = Status::Fail;
        }
        self
    }

    pub fn fail(mut self) -> Self {
        self.status = Status::Fail;
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        let _ = writeln!(out, "{} {}: {status}", self.command, self.subject);
        if let Some(m) = &self.span_mode {
            let _ = writeln!(out, "  span mode: {m}");
        }
        let width = self
            .findings
            .iter()
            .map(|f| f.label.chars().count())
            .max()
            .unwrap_or(0);
        for f in &self.findings {
            let pad = width - f.label.chars().count();
            let line = format!(
                "  {}{}  {:<7} {}",
                f.label,
                " ".repeat(pad),
                f.outcome,
                f.detail
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for (k, v) in &self.data {
            if v.contains('\n') {
                let _ = writeln!(out, "  {k}:");
                for line in v.lines() {
                    let _ = writeln!(out, "    {line}");
                }
            } else {
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
        out
    }
}
