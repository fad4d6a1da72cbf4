//! Numerical laboratory for Helson zeta functions ζ_χ(s) = Σ χ(n) n^{−s} with
//! completely multiplicative unimodular χ.
//!
//! The crate selects prime supports and character angles by inductive block
//! constructions, evaluates the resulting analytic continuations in closed
//! form (exact Mellin transforms of the construction error, exponential-
//! integral ray integrals), and verifies prescribed zero/pole data by
//! argument-principle winding numbers, ledger replay, and mean-square
//! Euler-product diagnostics.

pub mod blaschke;
pub mod config;
pub mod construct;
pub mod continuation;
pub mod error;
pub mod expint;
pub mod meansquare;
pub mod multiset;
pub mod pipeline;
pub mod primes;
pub mod report;
pub mod rng;
pub mod zeta;

pub use error::{Error, Result};
