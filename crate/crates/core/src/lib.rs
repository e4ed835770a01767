//! Energy-constrained single-mode phase estimation.
//!
//! The crate computes the minimal average error `tau(E)` of the covariant
//! phase measurement under a mean photon-number budget, builds the optimal
//! and near-optimal probe states (continuum profiles, squeezed-state
//! superpositions, heralded preparation), and contrasts the attainable
//! bound with the Cramér-Rao type bound, which collapses to zero under the
//! same budget.
//!
//! Module map:
//!
//! * [`fock`]: truncated photon-number states, moments, parity sectors.
//! * [`phase`]: covariant measurement statistics, the error functional,
//!   the constrained minimizer, Monte-Carlo sampling and the pointer-based
//!   realization of the measurement.
//! * [`continuum`]: scaling-limit profiles and their cost.
//! * [`squeeze`]: squeezing-operator matrix elements and squeezed-state
//!   superpositions.
//! * [`herald`]: amplitude model of the four-photon heralding scheme.
//! * [`crb`]: Fisher information and the divergent-variance family.
//! * [`cli`]: experiment drivers behind the `phaseprobe` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuum;
pub mod crb;
pub mod error;
pub mod fock;
pub mod herald;
pub mod phase;
pub mod special;
pub mod squeeze;
mod tridiag;

pub use error::{Error, Result};
pub use fock::{FockVector, ParitySplit, Parity};

/// Crate version embedded in every CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
