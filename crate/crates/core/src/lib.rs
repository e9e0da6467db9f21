//! Memory-load tradeoffs for broadcast caching networks.
//!
//! A server holds `N` files and serves `K` cache-equipped users over a shared
//! error-free link. This crate implements the classic coded caching
//! achievable schemes (uncoded placement with XOR multicast delivery, plus the
//! small-cache coded-placement scheme), the cut-set outer bound, and an
//! index-coding converse which certifies that for `N >= K` the piecewise
//! linear achievable curve is optimal among all uncoded placements, even when
//! only the total cache size and total file length are constrained.
//!
//! All bound and load computations are generic over a [`Scalar`] type. The
//! verification paths instantiate them with [`Exact`] (arbitrary-precision
//! rationals) so that every equality in the optimality argument is checked
//! bit-exactly; `f64` works too when a quick numeric evaluation is enough.
//!
//! Module map:
//!
//! * [`combinatorics`]: bitmask user sets, subset/permutation enumeration,
//!   binomial identities.
//! * [`schemes`]: achievable loads, the cut-set bound, large-cache optimality.
//! * [`simulator`]: bit-exact placement, XOR delivery, and peeling decoder.
//! * [`index_coding`]: side-information digraphs, acyclic-set bounds, and the
//!   permutation-indexed acyclic sets that drive the converse.
//! * [`converse`]: inequality aggregation, variable elimination, the exact LP
//!   oracle, and the end-to-end optimality verifier.
//! * [`curve`]: exact piecewise-linear tradeoff curves.

pub mod bits;
pub mod combinatorics;
pub mod converse;
pub mod curve;
mod error;
pub mod index_coding;
mod scalar;
pub mod schemes;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar used by every verification path.
pub type Exact = num_rational::BigRational;

/// Shorthand for `Exact` construction from an integer ratio.
pub fn exact(numer: i64, denom: i64) -> Exact {
    <Exact as Scalar>::from_ratio(numer, denom)
}
