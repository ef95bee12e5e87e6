//! Dense univariate polynomials with big-rational coefficients.
//!
//! Coefficients are stored in ascending degree order. The representation is
//! canonical: empty vector for the zero polynomial, nonzero last coefficient
//! otherwise.

use crate::Rat;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        RatPoly {
            coeffs: vec![Rat::one()],
        }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c * t^n.
    pub fn monomial(c: Rat, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        RatPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dlead = divisor.leading().unwrap().clone();
        let ddeg = divisor.degree().unwrap();
        let mut rem = self.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(ddeg)];
        while let Some(rdeg) = rem.degree() {
            if rdeg < ddeg {
                break;
            }
            let factor = rem.leading().unwrap() / &dlead;
            let shift = rdeg - ddeg;
            quot[shift] = factor.clone();
            rem = rem.sub(&divisor.mul(&Self::monomial(factor, shift)));
        }
        (Self::new(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.leading().cloned() {
            a = a.scale(&lead.recip());
        }
        a
    }

    /// Number of trailing zero coefficients, i.e. the largest v with t^v | self.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide by t^v exactly.
    pub fn shift_down(&self, v: usize) -> Self {
        debug_assert!(self.trailing_zeros() >= v || self.is_zero());
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs[v..].to_vec())
    }

    /// Multiply by t^v.
    pub fn shift_up(&self, v: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); v];
        coeffs.extend_from_slice(&self.coeffs);
        RatPoly { coeffs }
    }

    /// Substitute t -> c*t.
    pub fn compose_scale(&self, c: &Rat) -> Self {
        let mut pow = Rat::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow *= c;
        }
        Self::new(out)
    }

    /// Substitute t -> c/t, returning (poly in t, power e) with
    /// `self(c/t) = poly(t) / t^e` and `e = deg(self)`.
    pub fn compose_inverse_scale(&self, c: &Rat) -> (Self, usize) {
        match self.degree() {
            None => (Self::zero(), 0),
            Some(d) => {
                let mut out = vec![Rat::zero(); d + 1];
                let mut pow = Rat::one();
                for (i, a) in self.coeffs.iter().enumerate() {
                    // a * (c/t)^i = a c^i t^{d-i} / t^d
                    out[d - i] = a * &pow;
                    pow *= c;
                }
                (Self::new(out), d)
            }
        }
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}
