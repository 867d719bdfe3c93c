//! Verification reports: named identity checks with pass/fail status and a
//! witness, rendered as text or as a stable JSON document.

use serde::Serialize;

/// Outcome of a single check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// The identity held on every tested input.
    Pass,
    /// The identity failed; the witness names an input.
    Fail,
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    /// Stable identifier, e.g. `hopf.coassociativity[suq2]`.
    #[serde(rename = "check-id")]
    pub id: String,
    /// Short description of the identity being checked.
    pub anchor: String,
    /// Pass or fail.
    pub status: Status,
    /// The first failing input, or a summary of what was covered.
    pub witness: String,
}

impl Check {
    /// True when the check passed.
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// An ordered list of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    /// What was checked.
    pub title: String,
    /// Checks in execution order.
    pub checks: Vec<Check>,
}

impl Report {
    /// An empty report.
    pub fn new(title: &str) -> Self {
        Report {
            title: title.to_string(),
            checks: Vec::new(),
        }
    }

    /// Appends a check.
    pub fn push(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        passed: bool,
        witness: impl Into<String>,
    ) {
        self.checks.push(Check {
            id: id.into(),
            anchor: anchor.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            witness: witness.into(),
        });
    }

    /// Appends a check built from a list of failures: passes when the list
    /// is empty, otherwise the first failure is the witness.
    pub fn push_failures(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        tested: usize,
        failures: &[String],
    ) {
        match failures.first() {
            None => self.push(id, anchor, true, format!("{tested} cases")),
            Some(f) => self.push(
                id,
                anchor,
                false,
                format!("{f} ({} of {tested} cases fail)", failures.len()),
            ),
        }
    }

    /// Appends all checks of another report.
    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Number of passing checks.
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed()).count()
    }

    /// Number of failing checks.
    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    /// True when every check passed.
    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// The first failing check.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    /// Looks up a check by id.
    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Pretty-printed JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{tag}] {}: {} -- {}\n",
                c.id, c.anchor, c.witness
            ));
        }
        out.push_str(&format!(
            "{} passed, {} failed\n",
            self.passed(),
            self.failed()
        ));
        out
    }
}
