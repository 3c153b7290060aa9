//! Residual norms and pass/fail reporting.
//!
//! Every identity check in the crate funnels into a [`ResidualReport`]:
//! interior max-norm and L2-norm of a residual field, an optional
//! convergence-order estimate, and pass/fail against a tolerance on the
//! max-norm. The two edge nodes use one-sided stencils and are excluded
//! from the norms.

use crate::field::FlaggedField1D;

/// Norms of one residual field plus pass/fail bookkeeping.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// What is being checked, named by the identity it certifies.
    pub label: String,
    /// Interior max-norm over trusted nodes.
    pub max_norm: f64,
    /// Interior discrete L2-norm, `sqrt(sum r^2 dx)`, over trusted nodes.
    pub l2_norm: f64,
    /// Convergence-order estimate from one refinement, when available.
    pub order: Option<f64>,
    /// Max-norm tolerance; `pass` is meaningless without one.
    pub tolerance: Option<f64>,
    /// Fraction of nodes excluded as untrusted (masked denominators).
    pub flagged_fraction: f64,
    /// Warnings, e.g. when more than 20% of the nodes are masked.
    pub warnings: Vec<String>,
}

impl ResidualReport {
    /// Build a report from a residual field, excluding the edge nodes.
    pub fn from_residual(label: impl Into<String>, residual: &FlaggedField1D) -> Self {
        let (max_norm, l2_norm) = interior_norms(residual);
        let flagged = residual.flagged_fraction();
        let mut warnings = Vec::new();
        if flagged > 0.2 {
            warnings.push(format!(
                "untrusted region: {:.1}% of nodes masked",
                flagged * 100.0
            ));
        }
        Self {
            label: label.into(),
            max_norm,
            l2_norm,
            order: None,
            tolerance: None,
            flagged_fraction: flagged,
            warnings,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn with_order(mut self, order: Option<f64>) -> Self {
        self.order = order;
        self
    }

    /// Pass/fail on the interior max-norm.
    pub fn pass(&self) -> bool {
        match self.tolerance {
            Some(tol) => self.max_norm <= tol,
            None => true,
        }
    }
}

/// Interior (edge-excluded) max-norm and L2-norm over trusted nodes.
pub fn interior_norms(residual: &FlaggedField1D) -> (f64, f64) {
    let n = residual.grid().len();
    let dx = residual.grid().dx();
    let mut max = 0.0_f64;
    let mut sum_sq = 0.0;
    for i in 1..n - 1 {
        if let Some(v) = residual.value_at(i) {
            max = max.max(v.abs());
            sum_sq += v * v;
        }
    }
    (max, (sum_sq * dx).sqrt())
}

/// Order estimate from norms on two grids whose spacing differs by 2x:
/// `log2(coarse / fine)`. Returns `None` when either norm is too small
/// for the ratio to mean anything.
pub fn convergence_order(coarse_norm: f64, fine_norm: f64) -> Option<f64> {
    if coarse_norm <= 1e-300 || fine_norm <= 1e-300 {
        return None;
    }
    Some((coarse_norm / fine_norm).log2())
}
