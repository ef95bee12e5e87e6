//! Rational functions in one indeterminate `t`, exact.

use super::poly::RatPoly;
use crate::error::{Error, Result};
use crate::Rat;
use num_traits::{One, Zero};
use std::fmt;

/// A rational function N(t)/D(t) in canonical form: D monic, gcd(N, D) = 1,
/// and D(0) != 0 so the function has a Taylor expansion at t = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: RatPoly,
    den: RatPoly,
}

impl RationalFunction {
    pub fn new(num: RatPoly, den: RatPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().map_or(false, |d| d > 0) {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let lead = den.leading().unwrap().clone();
        let num = num.scale(&lead.recip());
        let den = den.scale(&lead.recip());
        if den.coeff(0).is_zero() {
            return Err(Error::DenominatorVanishesAtOrigin);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: RatPoly::zero(),
            den: RatPoly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RationalFunction {
            num: RatPoly::constant(c),
            den: RatPoly::one(),
        }
    }

    pub fn num(&self) -> &RatPoly {
        &self.num
    }
    pub fn den(&self) -> &RatPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// First m+1 Taylor coefficients at t = 0 by exact long division.
    pub fn series_expand(&self, m: usize) -> Vec<Rat> {
        let d0 = self.den.coeff(0);
        debug_assert!(!d0.is_zero());
        let mut out = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut acc = self.num.coeff(i);
            for j in 1..=i.min(self.den.coeffs().len().saturating_sub(1)) {
                acc -= self.den.coeff(j) * &out[i - j];
            }
            out.push(acc / &d0);
        }
        out
    }

    pub fn eval(&self, t: &Rat) -> Option<Rat> {
        let d = self.den.eval(t);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t) / d)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("denominators nonvanishing at 0")
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("denominators nonvanishing at 0")
    }

    /// Rational roots of the denominator (the reconstructible poles).
    ///
    /// Exhaustive over divisor candidates of the integerized trailing and
    /// leading coefficients; factors whose prime content exceeds the trial
    /// bound are skipped, so the list may be a subset for adversarial input.
    pub fn rational_poles(&self) -> Vec<Rat> {
        rational_roots(&self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// A Laurent-style rational function `t^shift * N(t)/D(t)` with N(0) != 0
/// (unless N = 0) and D(0) != 0. This closes the rational functions under
/// the substitution t -> c/t used by the functional equation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentRat {
    pub shift: i64,
    pub fun: RationalFunction,
}

impl LaurentRat {
    /// Canonicalize num/den by factoring powers of t into `shift`.
    pub fn new(shift: i64, num: RatPoly, den: RatPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(LaurentRat {
                shift: 0,
                fun: RationalFunction::zero(),
            });
        }
        let vn = num.trailing_zeros();
        let vd = den.trailing_zeros();
        let fun = RationalFunction::new(num.shift_down(vn), den.shift_down(vd))?;
        Ok(LaurentRat {
            shift: shift + vn as i64 - vd as i64,
            fun,
        })
    }

    pub fn from_fun(fun: RationalFunction) -> Self {
        let vn = fun.num().trailing_zeros();
        if fun.is_zero() || vn == 0 {
            return LaurentRat { shift: 0, fun };
        }
        LaurentRat {
            shift: vn as i64,
            fun: RationalFunction::new(fun.num().shift_down(vn), fun.den().clone()).unwrap(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fun.is_zero()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        LaurentRat {
            shift: self.shift,
            fun: self.fun.scale(c),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        LaurentRat::new(
            self.shift + other.shift,
            self.fun.num().mul(other.fun.num()),
            self.fun.den().mul(other.fun.den()),
        )
        .expect("nonzero denominators")
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let a = self.fun.num().shift_up((self.shift - s) as usize);
        let b = other.fun.num().shift_up((other.shift - s) as usize);
        let num = a
            .mul(other.fun.den())
            .add(&b.mul(self.fun.den()));
        let den = self.fun.den().mul(other.fun.den());
        LaurentRat::new(s, num, den).expect("nonzero denominators")
    }

    /// Divide; error if `other` is zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        LaurentRat::new(
            self.shift - other.shift,
            self.fun.num().mul(other.fun.den()),
            self.fun.den().mul(other.fun.num()),
        )
    }

    /// Substitute t -> c/t (c != 0). Rational functions are closed under
    /// this, with the pole/zero at the origin tracked by `shift`.
    pub fn substitute_inverse(&self, c: &Rat) -> Self {
        assert!(!c.is_zero());
        if self.is_zero() {
            return self.clone();
        }
        let (n2, en) = self.fun.num().compose_inverse_scale(c);
        let (d2, ed) = self.fun.den().compose_inverse_scale(c);
        // t^shift -> c^shift t^{-shift}
        let cpow = pow_rat(c, self.shift);
        LaurentRat::new(ed as i64 - en as i64 - self.shift, n2.scale(&cpow), d2)
            .expect("nonzero denominators")
    }

    /// As a plain rational function when the shift is nonnegative and the
    /// denominator keeps D(0) != 0.
    pub fn to_rational_function(&self) -> Option<RationalFunction> {
        if self.is_zero() {
            return Some(RationalFunction::zero());
        }
        if self.shift < 0 {
            return None;
        }
        Some(RationalFunction {
            num: self.fun.num().shift_up(self.shift as usize),
            den: self.fun.den().clone(),
        })
    }

    pub fn eval(&self, t: &Rat) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if t.is_zero() {
            return None;
        }
        let base = self.fun.eval(t)?;
        Some(base * pow_rat(t, self.shift))
    }
}

impl fmt::Display for LaurentRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.fun)
        } else {
            write!(f, "t^{} * {}", self.shift, self.fun)
        }
    }
}

fn pow_rat(c: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= c;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// All rational roots of a nonzero polynomial, by trial against divisor
/// candidates of the integerized extreme coefficients.
pub(crate) fn rational_roots(poly: &RatPoly) -> Vec<Rat> {
    use num_bigint::BigInt;
    let mut out = Vec::new();
    let mut p = poly.clone();
    if p.is_zero() {
        return out;
    }
    // pull out roots at 0
    if p.trailing_zeros() > 0 {
        out.push(Rat::zero());
        p = p.shift_down(p.trailing_zeros());
    }
    // integerize
    let mut denlcm = BigInt::from(1);
    for c in p.coeffs() {
        denlcm = num_integer::lcm(denlcm.clone(), c.denom().clone());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * &denlcm / c.denom())
        .collect();
    let trailing = ints.first().cloned().unwrap_or_default();
    let leading = ints.last().cloned().unwrap_or_default();
    let cand_p = bounded_divisors(&trailing);
    let cand_q = bounded_divisors(&leading);
    let mut p = p;
    for a in &cand_p {
        for b in &cand_q {
            for sign in [1i64, -1] {
                let cand = Rat::new(a * BigInt::from(sign), b.clone());
                while p.degree().map_or(false, |d| d >= 1) && p.eval(&cand).is_zero() {
                    out.push(cand.clone());
                    let lin = RatPoly::new(vec![-cand.clone(), Rat::one()]);
                    p = p.div_rem(&lin).0;
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn bounded_divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let mut n = n.abs();
    if n.is_zero() {
        return vec![BigInt::from(1)];
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u64);
    while &d * &d <= n && d <= limit {
        let mut e = 0u32;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::from(1) && n <= limit {
        factors.push((n, 1));
    }
    // if a large prime cofactor remains it is silently dropped: its divisors
    // are not enumerable cheaply, and the caller only promises roots "where
    // rational" for reconstructible denominators
    let mut divs = vec![BigInt::from(1)];
    for (f, e) in factors {
        let prev = divs.clone();
        let mut fp = BigInt::from(1);
        for _ in 0..e {
            fp *= &f;
            for d in &prev {
                divs.push(d * &fp);
            }
            if divs.len() > 4096 {
                return divs;
            }
        }
    }
    divs
}
