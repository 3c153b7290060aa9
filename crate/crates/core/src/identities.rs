//! Generic differential identities checked by stencil evaluation.

use crate::field::{FlaggedField1D, RealField1D};
use crate::report::{convergence_order, ResidualReport};

/// Residual of the product-rule identity
/// `div(S grad S) = (grad S)^2 + S lap S`,
/// evaluated with the crate's stencils. The identity is exact for smooth
/// fields, so only discretization error remains and the interior
/// max-norm must shrink at second order. When the grid can be coarsened
/// (odd node count) the report carries the measured order from one
/// 2x refinement.
pub fn vector_identity_residual(s: &RealField1D) -> ResidualReport {
    let fine = residual_field(s);
    let fine_report = ResidualReport::from_residual("div(S grad S) - (grad S)^2 - S lap S", &fine);
    let order = s.coarsen().map(|coarse_s| {
        let coarse = residual_field(&coarse_s);
        let coarse_report = ResidualReport::from_residual("coarse", &coarse);
        convergence_order(coarse_report.max_norm, fine_report.max_norm)
    });
    fine_report.with_order(order.flatten())
}

fn residual_field(s: &RealField1D) -> FlaggedField1D {
    let ds = s.d1();
    let flux = s.zip(&ds, |a, b| a * b);
    let lhs = flux.d1();
    let rhs = ds.zip(&ds, |a, b| a * b).zip(&s.zip(&s.d2(), |a, b| a * b), |a, b| a + b);
    FlaggedField1D::trusted(lhs.zip(&rhs, |a, b| a - b))
}
