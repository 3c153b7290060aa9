//! polarlab: a numerical laboratory for the polar split of quantum waves.
//!
//! Every solver here writes the wavefunction as `R exp(i S / hbar)` and
//! certifies, by residual checks on uniform 1D grids, the identities
//! that the amplitude `R` and the action `S` satisfy for four wave
//! equations: the time-dependent Schrödinger equation, the canonical
//! amplitude/phase flows derived from it, the 1+1-dimensional Dirac
//! equation, and the Klein–Gordon and telegraph (damped wave) equations.
//!
//! The guide under `book/` walks through the concepts; its code blocks
//! compile and run as doctests of this crate (see [`guide`]).

// negated comparisons like `!(dt > 0.0)` are parameter guards that must
// also reject NaN; the non-negated forms would let NaN through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod constants;
pub mod dirac;
pub mod error;
pub mod field;
pub mod grid;
pub mod guide;
pub mod identities;
pub mod polar;
pub mod relativistic;
pub mod report;
pub mod schrodinger;
pub mod stencil;

pub use constants::Constants;
pub use error::{PolarError, Result};
pub use field::{ComplexField1D, FlaggedField1D, RealField1D};
pub use grid::Grid1D;
pub use polar::{decompose, recompose, split_uw, PolarPair};
pub use report::ResidualReport;
