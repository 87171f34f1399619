//! Exact Schur-Weyl machinery for entanglement concentration of multiqubit
//! W-class states.
//!
//! The crate computes, in exact arithmetic wherever the algebra allows it:
//!
//! - the recursive qubit Schur transform ([`schur`]),
//! - two-row partition combinatorics and generalized Kronecker coefficients
//!   ([`partitions`]),
//! - the weight-space states of W-class normal forms ([`wstates`]),
//! - the W-class Kronecker states from their recurrence ([`kronstate`]),
//! - SLOCC covariants through the Omega process ([`covariants`]),
//! - Louck / Hahn-Eberlein polynomials and GHZ residual spectra ([`ghz`]),
//! - sector probabilities by joint-weight counting ([`probw`]),
//! - and a dense brute-force oracle that checks all of the above ([`protocol`]).

pub mod covariants;
pub mod error;
pub mod exact;
pub mod ghz;
pub mod kronstate;
pub mod partitions;
pub mod probw;
pub mod protocol;
pub mod schur;
pub mod wstates;

pub use error::{Error, Result};
pub use exact::{RadicalSum, Rational, SqrtRational};
pub use partitions::{PartitionTuple, TwoRowPartition};
