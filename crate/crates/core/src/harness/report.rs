use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{QInstance, QTuple};

/// A trial whose conclusion did not hold. Re-running `trial` of the suite
/// with the same `seed` and sizes regenerates the same data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub seed: u64,
    pub trial: u64,
    pub tuple: QTuple,
    pub instance: Option<QInstance>,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub name: String,
    pub statement: String,
    /// The suite samples a universally quantified family.
    pub sampled_universal: bool,
    pub seed: u64,
    pub max_n: usize,
    pub max_k: usize,
    pub trials: u64,
    pub evaluated: u64,
    pub skipped: u64,
    pub passes: u64,
    pub unknown: u64,
    /// Per-tag counts of passing trials, e.g. how many tuples had the
    /// hypothesis verdict `Yes`.
    pub tags: BTreeMap<String, u64>,
    pub fixtures: Vec<FixtureCheck>,
    pub failures: Vec<FailureRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.fixtures.iter().all(|f| f.passed)
    }

    pub fn tag(&self, name: &str) -> u64 {
        self.tags.get(name).copied().unwrap_or(0)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} ({}){}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            if self.sampled_universal { " [sampled-universal]" } else { "" }
        )?;
        writeln!(f, "  {}", self.statement)?;
        writeln!(
            f,
            "  seed {}  n <= {}  k <= {}  trials {}  evaluated {}  skipped {}  passed {}  unknown {}  failed {}",
            self.seed,
            self.max_n,
            self.max_k,
            self.trials,
            self.evaluated,
            self.skipped,
            self.passes,
            self.unknown,
            self.failures.len()
        )?;
        if !self.tags.is_empty() {
            let tags: Vec<String> = self.tags.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "  tags: {}", tags.join(" "))?;
        }
        for fx in &self.fixtures {
            writeln!(f, "  fixture {}: {} {}", fx.name, if fx.passed { "ok" } else { "FAILED" }, fx.detail)?;
        }
        for fl in &self.failures {
            writeln!(
                f,
                "  failure seed {} trial {}: expected {}, observed {}",
                fl.seed, fl.trial, fl.expected, fl.observed
            )?;
        }
        Ok(())
    }
}
