//! Exact local zeta integrals of reductive prehomogeneous vector spaces.
//!
//! The crate covers a small catalog of spaces (the multiplicative line, the
//! space of 2x2 matrices under `GL(2) x GL(2)`, and the split cube space
//! `M2 + M2` under `GL(2)^3`), together with:
//!
//! - exact arithmetic: residue rings `Z/p^k`, big rationals, univariate
//!   rational functions and Pade reconstruction ([`arith`]);
//! - the catalog itself: group actions, dual actions, pairings and
//!   eigencharacters, generic over the scalar ring ([`pvs`]);
//! - relative invariants, the eigencharacter identity and the logarithmic
//!   derivative map to the dual space ([`invariants`]);
//! - orbit classification for the cube space and stabilizer / torus-character
//!   checks ([`orbits`]);
//! - exact p-adic valuation censuses and rational reconstruction of the zeta
//!   integral `Z(t) = sum_m c_m t^m` in `t = p^-s` ([`zeta_padic`]);
//! - Schwartz-Bruhat coset functions, the p-adic Fourier transform and
//!   gamma-factor extraction from the functional equation ([`schwartz`],
//!   [`gamma`]);
//! - Archimedean zeta integrals in the convergent range ([`zeta_real`]).
//!
//! All p-adic results are exact (big-rational arithmetic throughout); floats
//! appear only in additive-character values and Archimedean quadrature.

pub mod arith;
pub mod error;
pub mod gamma;
pub mod invariants;
pub mod matrix;
pub mod orbits;
pub mod pvs;
pub mod ring;
pub mod rng;
pub mod schwartz;
pub mod zeta_padic;
pub mod zeta_real;

pub use error::Error;

/// Exact rational scalar used everywhere precision matters.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Complex double, used for character values and quadrature results.
pub type C64 = num_complex::Complex64;

/// Convenience constructor for an exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// Convenience constructor for an exact rational integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from(Int::from(n))
}
