//! Exact SU(2) coupling coefficients and the entropic structure of their
//! squares.
//!
//! The crate computes Wigner 3-j symbols and Clebsch-Gordan coefficients in
//! exact arithmetic two independent ways (the explicit Racah-type sum and a
//! Hahn-polynomial / terminating 3F2 backend), assembles the bistochastic
//! matrix of squared coefficients for a spin pair, and evaluates Shannon,
//! Tsallis, mutual-information, and Araki-Lieb inequality margins on the
//! column probability distributions.
//!
//! Layout:
//! - [`exact`]: big rationals, half-integer labels, signed square roots,
//!   factorial/Pochhammer primitives, and an exact accumulator for sums of
//!   square roots.
//! - [`cg`]: 3-j symbols, Clebsch-Gordan coefficients, orthogonality checks.
//! - [`hahn`]: Hahn polynomials via terminating 3F2, and the alternative
//!   Clebsch-Gordan backend built from them.
//! - [`prob`]: the bistochastic matrix and column joint/marginal
//!   distributions.
//! - [`entropy`]: Shannon/Tsallis entropies and the inequality suite.
//! - [`cli`]: command implementations behind the `cgent` binary.

use num_rational::BigRational;
use thiserror::Error;

pub mod cg;
pub mod cli;
pub mod entropy;
pub mod exact;
pub mod hahn;
pub mod prob;

pub use cg::CouplingLabel;
pub use exact::{HalfInt, SignedSqrtRational};

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin magnitude {j}: must be a nonnegative half-integer")]
    InvalidSpin { j: HalfInt },

    #[error("invalid (j, m) pair (j = {j}, m = {m}): requires |m| <= j and j - m integer")]
    InvalidPair { j: HalfInt, m: HalfInt },

    #[error("cannot parse {input:?} as a half-integer (expected forms like \"3\", \"5/2\", \"2.5\")")]
    ParseHalfInt { input: String },

    #[error("singular 3F2 parameters: lower parameter {parameter} vanishes at term {term} before the series terminates")]
    SingularHypergeometric { parameter: BigRational, term: u64 },

    #[error("gamma argument {arg} is not a positive integer")]
    GammaDomain { arg: BigRational },

    #[error("Hahn weight requires alpha > -1 and beta > -1 (got alpha = {alpha}, beta = {beta})")]
    WeightDomain { alpha: BigRational, beta: BigRational },

    #[error("invalid Hahn parameters: {reason}")]
    InvalidHahnParams { reason: String },

    #[error(
        "label maps outside the Hahn domain even after the m-reflection \
         (alpha = {alpha}, beta = {beta})"
    )]
    UnsupportedLabel { alpha: BigRational, beta: BigRational },

    #[error("(j = {j}, m = {m}) does not address a column of the (j1 = {j1}, j2 = {j2}) block")]
    NonAddressableColumn {
        j1: HalfInt,
        j2: HalfInt,
        j: HalfInt,
        m: HalfInt,
    },

    #[error("entropic index q must be positive (got {q})")]
    InvalidEntropicIndex { q: f64 },

    #[error("invalid probability distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("invalid q grid: {reason}")]
    InvalidQGrid { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
