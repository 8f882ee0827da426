//! 2-adic valuations of Stirling numbers of the second kind.
//!
//! The crate is organised around two independent ways of getting at
//! `S(n, k)`: an exact big-integer triangle ([`stirling::StirlingTriangle`],
//! [`stirling::stirling_exact`]) and a modular alternating-sum engine
//! ([`stirling::ModStirlingEngine`]) that works in `Z / 2^M` with adaptive
//! precision. Everything else (residue-class trees, the `k = 5` machinery,
//! auxiliary sequences and the approximation tower) is built on top of
//! those two and reports its findings as [`report::ConjectureReport`]s.
//!
//! Integer primitives in [`padic`] are generic over the integer type
//! (machine words or the big-integer aliases below); modular arithmetic in
//! [`modring`] is generic over the word type backing `Z / 2^M`.

pub mod approx;
pub mod clarke;
pub mod classes;
pub mod error;
pub mod k5;
pub mod modring;
pub mod padic;
pub mod report;
pub mod sequences;
pub mod series;
pub mod stirling;
pub mod valuation;

/// Arbitrary-precision natural number.
pub type BigNat = num_bigint::BigUint;
/// Arbitrary-precision signed integer.
pub type BigSigned = num_bigint::BigInt;
/// Exact rational in lowest terms with positive denominator.
pub type BigRat = num_rational::BigRational;

pub use error::{Error, Result};
pub use report::{ConjectureReport, Status};
pub use stirling::{ModStirlingEngine, Precision};
pub use valuation::{Valuation, ValuationOutcome};
