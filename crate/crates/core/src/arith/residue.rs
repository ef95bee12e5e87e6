//! The residue ring `Z/p^k` with p prime.

use super::{is_prime_u64, mul_mod_u64};
use crate::error::{Error, Result};
use crate::ring::Scalar;

/// A fixed residue ring `Z/p^k`. Values carry a copy (it is two words), so
/// residues are self-describing and arithmetic can check ring agreement.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct ResidueRing {
    p: u64,
    k: u32,
    modulus: u64,
}

impl ResidueRing {
    /// Construct `Z/p^k`. `p` must be prime, `k >= 1`, and `p^k` must fit in
    /// 63 bits so products fit in u128.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        assert!(k >= 1, "level k must be >= 1");
        let mut modulus: u64 = 1;
        for _ in 0..k {
            modulus = modulus
                .checked_mul(p)
                .filter(|m| *m < (1 << 63))
                .ok_or_else(|| Error::PrecisionOverflow(format!("{p}^{k}")))?;
        }
        Ok(ResidueRing { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elem(&self, value: i64) -> Residue {
        let m = self.modulus as i128;
        let v = ((value as i128 % m) + m) % m;
        Residue {
            value: v as u64,
            ring: *self,
        }
    }

    pub fn zero(&self) -> Residue {
        self.elem(0)
    }
    pub fn one(&self) -> Residue {
        self.elem(1)
    }

    /// All elements, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = Residue> + '_ {
        let ring = *self;
        (0..self.modulus).map(move |v| Residue { value: v, ring })
    }
}

/// p-adic valuation of a residue, truncated at the ring level.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Valuation {
    Finite(u32),
    /// The residue is 0 mod p^k, so only `val >= k` is known.
    AtLeastK,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Residue {
    value: u64,
    ring: ResidueRing,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }
    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    /// Largest m < k with p^m dividing the value, or [`Valuation::AtLeastK`]
    /// for the zero residue. The marker is deliberately distinct from
    /// `Finite(k)`: precision is exhausted, not measured.
    pub fn valuation(&self) -> Valuation {
        if self.value == 0 {
            return Valuation::AtLeastK;
        }
        let mut v = 0u32;
        let mut x = self.value;
        while x % self.ring.p == 0 {
            x /= self.ring.p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.ring.p != 0
    }

    fn check_ring(&self, other: &Self) {
        assert_eq!(
            self.ring, other.ring,
            "residue arithmetic across different rings"
        );
    }
}

impl Scalar for Residue {
    fn add(&self, other: &Self) -> Self {
        self.check_ring(other);
        let mut v = self.value + other.value;
        if v >= self.ring.modulus {
            v -= self.ring.modulus;
        }
        Residue {
            value: v,
            ring: self.ring,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.check_ring(other);
        let v = if self.value >= other.value {
            self.value - other.value
        } else {
            self.value + self.ring.modulus - other.value
        };
        Residue {
            value: v,
            ring: self.ring,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        Residue {
            value: mul_mod_u64(self.value, other.value, self.ring.modulus),
            ring: self.ring,
        }
    }

    fn neg(&self) -> Self {
        Residue {
            value: if self.value == 0 {
                0
            } else {
                self.ring.modulus - self.value
            },
            ring: self.ring,
        }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Inverse exists iff the value is a unit (valuation 0). Computed by
    /// extended Euclid against p^k.
    fn try_inv(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let m = self.ring.modulus as i128;
        let (mut r0, mut r1) = (m, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        let v = ((t0 % m) + m) % m;
        Some(Residue {
            value: v as u64,
            ring: self.ring,
        })
    }

    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.ring.elem(n)
    }
}
