//! Scalar abstraction for the rings the catalog acts over.
//!
//! Group actions, pairings and invariant evaluation are written once,
//! generically over [`Scalar`], and instantiated at exact rationals (`Q` and
//! integer points inside it), residue rings `Z/p^k` ([`crate::arith::Residue`])
//! and `f64` for the Archimedean module. `zero_like`/`one_like` take a
//! witness value so that ring-carrying scalars (residues) know their modulus.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, when this element is a unit.
    fn try_inv(&self) -> Option<Self>;
    /// Additive identity of the ring this value lives in.
    fn zero_like(&self) -> Self;
    /// Multiplicative identity of the ring this value lives in.
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        let neg = n < 0;
        for _ in 0..n.unsigned_abs() {
            acc = acc.add(&one);
        }
        if neg {
            acc.neg()
        } else {
            acc
        }
    }
}

impl Scalar for BigRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Self::from(num_bigint::BigInt::from(n))
    }
}

impl Scalar for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_i64_like(&self, n: i64) -> Self {
        n as f64
    }
}
