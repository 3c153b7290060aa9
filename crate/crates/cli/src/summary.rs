//! Machine-readable run summaries.
//!
//! One JSON document per scenario plus `suite.json` for batch runs. The
//! only field that varies between identical runs is `wall_time_s`;
//! everything else is byte-stable so suites can be diffed.

use serde::Serialize;

/// Direction of a check: residual-style upper bounds, or lower bounds
/// for measured convergence orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Upper,
    Lower,
}

/// One named check with its value, tolerance, and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// What the value is: a max-norm, a relative gap, a measured order.
    pub norm: String,
    pub bound: Bound,
    pub value: f64,
    /// Convergence-order estimate attached to a residual check, when the
    /// scenario measured one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Residual-style check: passes when `value <= tolerance`.
    pub fn upper(name: &str, norm: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            norm: norm.into(),
            bound: Bound::Upper,
            value,
            order: None,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Order-style check: passes when `value >= tolerance`.
    pub fn lower(name: &str, norm: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            norm: norm.into(),
            bound: Bound::Lower,
            value,
            order: None,
            tolerance,
            pass: value >= tolerance,
        }
    }

    /// Attach a measured convergence order to a residual check.
    pub fn with_order(mut self, order: Option<f64>) -> Self {
        self.order = order;
        self
    }
}

/// Result of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    /// The mathematical statement this scenario certifies.
    pub certifies: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn new(scenario: &str, certifies: &str, checks: Vec<Check>, artifacts: Vec<String>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            scenario: scenario.into(),
            certifies: certifies.into(),
            checks,
            artifacts,
            pass,
            wall_time_s: 0.0,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Aggregate over a directory of scenarios, ordered by id.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub scenarios: Vec<RunSummary>,
    pub total: usize,
    pub failed: usize,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl SuiteSummary {
    pub fn new(scenarios: Vec<RunSummary>) -> Self {
        let total = scenarios.len();
        let failed = scenarios.iter().filter(|s| !s.pass).count();
        Self { scenarios, total, failed, pass: failed == 0, wall_time_s: 0.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_the_bound_direction() {
        assert!(Check::upper("r", "max", 1e-9, 1e-6).pass);
        assert!(!Check::upper("r", "max", 1e-3, 1e-6).pass);
        assert!(Check::lower("order", "order", 2.1, 1.8).pass);
        assert!(!Check::lower("order", "order", 1.2, 1.8).pass);
    }

    #[test]
    fn summary_pass_is_the_conjunction() {
        let ok = Check::upper("a", "max", 0.0, 1.0);
        let bad = Check::upper("b", "max", 2.0, 1.0);
        let s = RunSummary::new("x", "y", vec![ok.clone(), bad], vec![]);
        assert!(!s.pass);
        assert_eq!(s.failed_checks().count(), 1);
        let s = RunSummary::new("x", "y", vec![ok], vec![]);
        assert!(s.pass);
    }
}
