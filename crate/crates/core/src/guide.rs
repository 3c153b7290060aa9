//! The narrative guide, compiled from the chapters under `book/src/`.
//!
//! Each chapter is included as module documentation so its code blocks
//! run as doctests: `cargo test --doc -p polarlab` executes every
//! snippet in the book, keeping prose and API in lockstep.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/fields-and-stencils.md")]
pub mod fields_and_stencils {}

#[doc = include_str!("../../../book/src/polar-form.md")]
pub mod polar_form {}

#[doc = include_str!("../../../book/src/split-schrodinger.md")]
pub mod split_schrodinger {}

#[doc = include_str!("../../../book/src/quantum-and-spin-potentials.md")]
pub mod quantum_and_spin_potentials {}

#[doc = include_str!("../../../book/src/canonical-flows.md")]
pub mod canonical_flows {}

#[doc = include_str!("../../../book/src/dirac-transport.md")]
pub mod dirac_transport {}

#[doc = include_str!("../../../book/src/relativistic-waves.md")]
pub mod relativistic_waves {}

// the CLI chapter lives in `polarlab-cli`, whose doctests can drive the
// runner; see that crate's `guide` module
