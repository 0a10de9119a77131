//! Machine-readable scenario reports.

use std::path::{Path, PathBuf};

use serde::Serialize;
use shintani_core::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
            Outcome::Inconclusive => 3,
        }
    }

    /// Worst outcome first: ERROR, then FAIL, then INCONCLUSIVE.
    pub fn combine(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
        outcomes.into_iter().max().unwrap_or(Outcome::Pass)
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Inconclusive => "INCONCLUSIVE",
            Outcome::Fail => "FAIL",
            Outcome::Error => "ERROR",
        })
    }
}

/// An exact certificate: a field point, an exponent pair, or a located fact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn element(label: &str, x: &Element) -> Self {
        Witness { label: label.into(), element: Some(coords(x)), exponents: None, note: None }
    }

    pub fn exponents(label: &str, k: (i64, i64)) -> Self {
        Witness { label: label.into(), element: None, exponents: Some(k), note: None }
    }

    pub fn note(label: &str, note: impl Into<String>) -> Self {
        Witness { label: label.into(), element: None, exponents: None, note: Some(note.into()) }
    }

    pub fn with_exponents(mut self, k: (i64, i64)) -> Self {
        self.exponents = Some(k);
        self
    }
}

pub fn coords(x: &Element) -> [String; 3] {
    x.coords().clone().map(|c| c.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// recorded but not counted towards the outcome
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, informational: false, detail: detail.into(), margin: None, witnesses: vec![] }
    }

    pub fn witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn witnesses(mut self, w: impl IntoIterator<Item = Witness>) -> Self {
        self.witnesses.extend(w);
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.margin = Some(m);
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub kind: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seed: u64,
    pub precision_bits: [u32; 2],
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl VerificationReport {
    pub fn new(scenario: &str, kind: &str, seed: u64, precision_bits: [u32; 2]) -> Self {
        VerificationReport {
            scenario: scenario.into(),
            kind: kind.into(),
            outcome: Outcome::Pass,
            error: None,
            seed,
            precision_bits,
            checks: vec![],
            artifacts: vec![],
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Derive the outcome from the counted checks. A failing check without
    /// a witness gets one naming the check, so FAIL is never bare.
    pub fn finish(mut self) -> Self {
        for c in &mut self.checks {
            if !c.pass && !c.informational && c.witnesses.is_empty() {
                c.witnesses.push(Witness::note(&c.name, c.detail.clone()));
            }
        }
        if self.outcome == Outcome::Pass && self.checks.iter().any(|c| !c.pass && !c.informational) {
            self.outcome = Outcome::Fail;
        }
        self
    }

    pub fn errored(mut self, outcome: Outcome, msg: String) -> Self {
        self.outcome = outcome;
        self.error = Some(msg);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn path_in(dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{}.report.json", id))
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let p = Self::path_in(dir, &self.scenario);
        std::fs::write(&p, self.to_json())?;
        Ok(p)
    }
}
