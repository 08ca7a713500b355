//! Verification reports shared by every suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Absolute slack for inequality checks in floating mode.
pub const SLACK: f64 = 1e-10;

/// Absolute slack for comparisons of norms that went through a `p`-th root.
pub const ROOT_SLACK: f64 = 1e-12;

/// Stable anchor strings attached to checks. Each names the statement a
/// check exercises; they never change between releases.
pub mod anchors {
    pub const REGULARITY: &str = "regularity:parent-child-ratio";
    pub const CHAIN_GAPS: &str = "lemma:chain-gaps";
    pub const ATOM_AVERAGE_GROWTH: &str = "lemma:atom-average-growth";
    pub const INDICATOR_NORM: &str = "lemma:indicator-norm";
    pub const INDICATOR_CLOSED_FORM: &str = "lemma:indicator-norm/closed-form";
    pub const EXTREMAL_CHAIN: &str = "lemma:extremal-chain";
    pub const EXTREMAL_MARTINGALE: &str = "lemma:extremal-chain/martingale";
    pub const DYADIC_H: &str = "remark:dyadic-h";
    pub const LIPSCHITZ: &str = "remark:lipschitz-composition";
    pub const PRODUCT_ESTIMATE: &str = "lemma:product-estimate";
    pub const LINF_BOUND: &str = "lemma:multiplier-linf-bound";
    pub const LINF_GROWTH: &str = "lemma:multiplier-linf-bound/level-growth";
    pub const TRUNCATION: &str = "proposition:martingale-truncation";
    pub const THEOREM_UPPER: &str = "theorem:multipliers/upper-bound";
    pub const THEOREM_CERTIFICATE: &str = "theorem:multipliers/certificate";
    pub const CONDITIONAL_MULTIPLIER: &str = "theorem:conditional-multipliers";
    pub const F_NORM: &str = "remark:measurable-set-norm";
    pub const PHI_CONDITIONS: &str = "phi:conditions";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("pass"),
            Status::Fail => f.write_str("fail"),
        }
    }
}

/// One named check with its measured constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub measured: BTreeMap<String, f64>,
    pub threshold: Option<f64>,
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: &str, passed: bool) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.to_string(),
            measured: BTreeMap::new(),
            threshold: None,
            passed,
            witness: None,
        }
    }

    pub fn measure(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn threshold(mut self, value: f64) -> Self {
        self.threshold = Some(value);
        self
    }

    pub fn witness(mut self, text: impl Into<String>) -> Self {
        self.witness = Some(text.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub status: Status,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            checks: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn push(&mut self, check: Check) {
        if !check.passed {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for check in other.checks {
            self.push(check);
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Looks up a check by name.
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_fail_iff_any_check_fails() {
        let mut report = VerificationReport::new("demo");
        report.push(Check::new("a", anchors::CHAIN_GAPS, true));
        assert!(report.passed());
        report.push(Check::new("b", anchors::CHAIN_GAPS, false).measure("ratio", 2.0));
        assert!(!report.passed());
        report.push(Check::new("c", anchors::CHAIN_GAPS, true));
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.failures().count(), 1);
    }
}
