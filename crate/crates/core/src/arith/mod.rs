//! Exact integer, residue-ring, rational-function and Pade arithmetic.

mod pade;
mod poly;
mod ratfun;
mod residue;

pub use pade::pade_reconstruct;
pub use poly::RatPoly;
pub use ratfun::{LaurentRat, RationalFunction};
pub use residue::{Residue, ResidueRing, Valuation};

/// Deterministic Miller-Rabin for u64 (the base set below is a proven
/// deterministic witness set for all n < 2^64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// p-adic valuation of a nonzero i128.
pub fn val_p_i128(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut v = 0u32;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}
