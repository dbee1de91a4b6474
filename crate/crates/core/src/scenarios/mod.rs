//! Packaged demonstration runs.
//!
//! Each scenario builds a small hybrid system whose qualitative behavior is
//! known in closed form, measures that behavior, and returns a report of
//! named claims with pass/fail flags and measured margins, together with
//! CSV/SVG artifacts ready to be written to disk. Scenario output is
//! deterministic: randomized draws are seeded explicitly and recorded.

pub mod circle;
pub mod flicker;
pub mod morse;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One checked statement with its measured margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    /// Measured slack behind the pass/fail decision, where meaningful.
    pub margin: Option<f64>,
    pub details: String,
}

impl Claim {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        margin: Option<f64>,
        details: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            margin,
            details: details.into(),
        }
    }
}

/// A file the caller should write next to the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// File name relative to the output directory.
    pub name: String,
    pub content: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            content: content.into(),
        }
    }
}

/// Outcome of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    /// Numeric parameters the run used, keyed by name.
    pub parameters: BTreeMap<String, f64>,
    /// Seed for randomized draws, when the scenario uses any.
    pub seed: Option<u64>,
    pub claims: Vec<Claim>,
    /// True when every claim passed.
    pub passed: bool,
    /// Names of the artifacts produced alongside this report.
    pub artifacts: Vec<String>,
}

impl ScenarioReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            parameters: BTreeMap::new(),
            seed: None,
            claims: Vec::new(),
            passed: true,
            artifacts: Vec::new(),
        }
    }

    pub fn set_parameter(&mut self, name: impl Into<String>, value: f64) {
        self.parameters.insert(name.into(), value);
    }

    pub fn push_claim(&mut self, claim: Claim) {
        self.passed = self.passed && claim.passed;
        self.claims.push(claim);
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive, with exact
/// endpoints.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

/// `n` evenly spaced points strictly inside `(lo, hi)`.
pub(crate) fn interior_linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n + 1) as f64;
    (1..=n).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_tracks_overall_verdict() {
        let mut r = ScenarioReport::new("demo");
        assert!(r.passed);
        r.push_claim(Claim::new("ok", true, Some(0.5), "fine"));
        assert!(r.passed);
        r.push_claim(Claim::new("bad", false, None, "broken"));
        assert!(!r.passed);
        assert!(r.claim("ok").unwrap().passed);
        assert_eq!(r.claim("missing"), None);
    }

    #[test]
    fn linspace_hits_exact_endpoints() {
        let xs = linspace(-1.0, 1.0, 41);
        assert_eq!(xs.len(), 41);
        assert_eq!(xs[0], -1.0);
        assert_eq!(xs[40], 1.0);
        assert_eq!(xs[20], 0.0);

        let inner = interior_linspace(-1.0, 1.0, 41);
        assert_eq!(inner.len(), 41);
        assert!(inner.iter().all(|&x| x > -1.0 && x < 1.0));
        assert!(inner[20].abs() < 1e-12);
    }
}
