//! Schwartz-Bruhat functions on Q_p^n as coset-indicator combinations, and
//! the Fourier transform against the standard additive character.
//!
//! The measure convention gives Z_p^n volume 1 on both sides; the pairing
//! lattices of the catalog spaces are self-dual (integer unimodular trace
//! pairings), so the transform of 1_{Z_p^n} is 1_{Z_p^n} and the double
//! transform with psi then -psi is the identity.
//!
//! Coefficients carry an exact rational alongside the complex double
//! whenever the value is exactly rational (centers pairing to integral or
//! half-integral phases); exactness then propagates into zeta combinations.

use crate::error::{Error, Result};
use crate::pvs::{pairing, Point, SpaceId};
use crate::rng::SplitMix64;
use crate::{C64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A coefficient: complex double plus, when the value is exactly a rational
/// real number, the exact witness.
#[derive(Clone, Debug)]
pub struct Coeff {
    pub value: C64,
    pub exact: Option<Rat>,
}

impl Coeff {
    pub fn from_rat(r: Rat) -> Self {
        Coeff {
            value: C64::new(rat_to_f64(&r), 0.0),
            exact: Some(r),
        }
    }

    pub fn from_complex(value: C64) -> Self {
        Coeff { value, exact: None }
    }

    pub fn zero() -> Self {
        Coeff::from_rat(Rat::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Coeff::from_rat(a + b),
            _ => Coeff::from_complex(self.value + o.value),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Coeff::from_rat(a * b),
            _ => Coeff::from_complex(self.value * o.value),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        match &self.exact {
            Some(a) => Coeff::from_rat(a * r),
            None => Coeff::from_complex(self.value * rat_to_f64(r)),
        }
    }

    pub fn is_exactly_zero(&self) -> bool {
        match &self.exact {
            Some(a) => a.is_zero(),
            None => self.value.re == 0.0 && self.value.im == 0.0,
        }
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// The standard additive character psi of Q_p (trivial on Z_p, nontrivial on
/// p^{-1} Z_p), or its inverse -psi. Ramified conductors are out of scope.
#[derive(Clone, Copy, Debug)]
pub struct AdditiveCharacter {
    pub conductor_exponent: i32,
    pub sign: i8,
}

impl AdditiveCharacter {
    pub fn standard() -> Self {
        AdditiveCharacter {
            conductor_exponent: 0,
            sign: 1,
        }
    }

    pub fn inverse() -> Self {
        AdditiveCharacter {
            conductor_exponent: 0,
            sign: -1,
        }
    }

    /// psi(t) = e^{2 pi i sign frac_p(t)}; exact when the fractional part is
    /// 0 or 1/2.
    pub fn value(&self, t: &Rat, p: u64) -> Coeff {
        assert_eq!(self.conductor_exponent, 0, "ramified psi not supported");
        let frac = frac_p(t, p);
        if frac.is_zero() {
            return Coeff::from_rat(Rat::one());
        }
        if frac == Rat::new(1.into(), 2.into()) {
            return Coeff::from_rat(-Rat::one());
        }
        let theta = 2.0 * std::f64::consts::PI * rat_to_f64(&frac) * self.sign as f64;
        Coeff::from_complex(C64::new(theta.cos(), theta.sin()))
    }
}

/// p-fractional part of a rational with p-power denominator, in [0, 1).
pub fn frac_p(t: &Rat, p: u64) -> Rat {
    let e = denom_p_exponent(t, p);
    if e == 0 {
        return Rat::zero();
    }
    let pe = BigInt::from(p).pow(e);
    // t = a / p^e with a integral
    let a = t.numer() * &pe / t.denom();
    let r = ((&a % &pe) + &pe) % &pe;
    Rat::new(r, pe)
}

/// Exponent e >= 0 with p^e t integral; panics if the denominator is not a
/// p-power (coset centers are maintained that way).
pub fn denom_p_exponent(t: &Rat, p: u64) -> u32 {
    let mut d = t.denom().clone();
    let pb = BigInt::from(p);
    let mut e = 0u32;
    while (&d % &pb).is_zero() {
        d /= &pb;
        e += 1;
    }
    assert!(d.abs().is_one(), "denominator is not a power of p");
    e
}

fn val_p_rat(t: &Rat, p: u64) -> Option<i64> {
    if t.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v: i64 = 0;
    let mut num = t.numer().clone();
    while (&num % &pb).is_zero() {
        num /= &pb;
        v += 1;
    }
    Some(v - denom_p_exponent(t, p) as i64)
}

/// One coset indicator: coeff * 1_{center + p^level Z_p^n}. Levels may be
/// negative (balls larger than Z_p^n).
#[derive(Clone, Debug)]
pub struct CosetTerm {
    pub center: Vec<Rat>,
    pub level: i32,
    pub coeff: Coeff,
}

/// A finite combination of coset indicators on Q_p^n. Canonical form keeps
/// centers reduced mod p^level, terms pairwise disjoint, and exact zeros
/// dropped.
#[derive(Clone, Debug)]
pub struct CosetFunction {
    pub p: u64,
    pub n: usize,
    pub terms: Vec<CosetTerm>,
}

const MAX_TERMS: usize = 4_000_000;

impl CosetFunction {
    pub fn zero(p: u64, n: usize) -> Self {
        CosetFunction {
            p,
            n,
            terms: vec![],
        }
    }

    /// Indicator of an integral coset center + p^level Z_p^n.
    pub fn indicator(p: u64, n: usize, center: &[i64], level: i32) -> Result<Self> {
        let centers: Vec<Rat> = center.iter().map(|&c| crate::rat_int(c)).collect();
        Self::indicator_rat(p, n, &centers, level)
    }

    pub fn indicator_rat(p: u64, n: usize, center: &[Rat], level: i32) -> Result<Self> {
        if center.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: center.len(),
            });
        }
        let mut f = CosetFunction {
            p,
            n,
            terms: vec![CosetTerm {
                center: center.to_vec(),
                level,
                coeff: Coeff::from_rat(Rat::one()),
            }],
        };
        f.canonicalize()?;
        Ok(f)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        CosetFunction {
            p: self.p,
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| CosetTerm {
                    center: t.center.clone(),
                    level: t.level,
                    coeff: t.coeff.mul(c),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let mut f = CosetFunction {
            p: self.p,
            n: self.n,
            terms: self
                .terms
                .iter()
                .chain(other.terms.iter())
                .cloned()
                .collect(),
        };
        f.canonicalize()?;
        Ok(f)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Coeff::from_rat(-Rat::one())))
    }

    fn reduce_center(&self, center: &[Rat], level: i32) -> Vec<Rat> {
        center
            .iter()
            .map(|c| reduce_mod_pk(c, self.p, level))
            .collect()
    }

    /// Canonicalize: reduce centers, split nested cosets down to a disjoint
    /// family, merge equal cosets, coalesce complete sibling families, drop
    /// exact zeros. Grouping and sorting run on integer-encoded center keys.
    pub fn canonicalize(&mut self) -> Result<()> {
        let p = self.p;
        let n = self.n;
        let mut work: Vec<(IKey, CosetTerm)> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let center = self.reduce_center(&t.center, t.level);
            let key = center_ikey(&center, p)?;
            work.push((
                key,
                CosetTerm {
                    center,
                    level: t.level,
                    coeff: t.coeff.clone(),
                },
            ));
        }
        // split any coset that properly contains a finer one; same-level
        // p-adic balls are equal or disjoint, so the containment test is a
        // reduced-center lookup per coarser level
        'outer: loop {
            let mut levels: Vec<i32> = work.iter().map(|(_, t)| t.level).collect();
            levels.sort_unstable();
            levels.dedup();
            if levels.len() <= 1 {
                break;
            }
            let mut by_level: std::collections::BTreeMap<i32, std::collections::BTreeMap<IKey, usize>> =
                std::collections::BTreeMap::new();
            for (i, (key, t)) in work.iter().enumerate() {
                by_level.entry(t.level).or_default().insert(key.clone(), i);
            }
            for (i, (key, t)) in work.iter().enumerate() {
                for &coarse in levels.iter().take_while(|&&l| l < t.level) {
                    let coarse_key = reduce_ikey(key, p, coarse)?;
                    if let Some(&owner) = by_level[&coarse].get(&coarse_key) {
                        if owner != i {
                            let (_, parent) = work.swap_remove(owner);
                            for child in split_coset(p, n, &parent)? {
                                let k = center_ikey(&child.center, p)?;
                                work.push((k, child));
                            }
                            if work.len() > MAX_TERMS {
                                return Err(Error::PrecisionOverflow(
                                    "coset refinement exceeds term cap".into(),
                                ));
                            }
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
        // merge identical cosets
        work.sort_by(|a, b| a.1.level.cmp(&b.1.level).then_with(|| a.0.cmp(&b.0)));
        let mut out: Vec<(IKey, CosetTerm)> = Vec::with_capacity(work.len());
        for (key, t) in work {
            match out.last_mut() {
                Some((k0, prev)) if prev.level == t.level && *k0 == key => {
                    prev.coeff = prev.coeff.add(&t.coeff);
                }
                _ => out.push((key, t)),
            }
        }
        out.retain(|(_, t)| !t.coeff.is_exactly_zero());
        // coalesce complete sibling families with equal coefficients back
        // into their parent coset, sweeping levels from finest to coarsest
        // (a freshly created parent can coalesce again at the next level)
        let pn = (p as u128).pow(n as u32);
        loop {
            let mut levels: Vec<i32> = out.iter().map(|(_, t)| t.level).collect();
            levels.sort_unstable();
            levels.dedup();
            let mut changed = false;
            for &level in levels.iter().rev() {
                let mut grouped: std::collections::BTreeMap<IKey, Vec<usize>> =
                    std::collections::BTreeMap::new();
                for (i, (key, t)) in out.iter().enumerate() {
                    if t.level == level {
                        grouped
                            .entry(reduce_ikey(key, p, level - 1)?)
                            .or_default()
                            .push(i);
                    }
                }
                let mut coalesced: Vec<usize> = Vec::new();
                let mut parents: Vec<(IKey, CosetTerm)> = Vec::new();
                for (pkey, idxs) in grouped {
                    if idxs.len() as u128 != pn {
                        continue;
                    }
                    let c0 = &out[idxs[0]].1.coeff;
                    if idxs.iter().all(|&i| coeff_identical(&out[i].1.coeff, c0)) {
                        let center: Vec<Rat> = out[idxs[0]]
                            .1
                            .center
                            .iter()
                            .map(|c| reduce_mod_pk(c, p, level - 1))
                            .collect();
                        parents.push((
                            pkey,
                            CosetTerm {
                                center,
                                level: level - 1,
                                coeff: c0.clone(),
                            },
                        ));
                        coalesced.extend(idxs);
                    }
                }
                if !parents.is_empty() {
                    changed = true;
                    coalesced.sort_unstable();
                    for &i in coalesced.iter().rev() {
                        out.swap_remove(i);
                    }
                    out.extend(parents);
                }
            }
            if !changed {
                break;
            }
        }
        out.sort_by(|a, b| a.1.level.cmp(&b.1.level).then_with(|| a.0.cmp(&b.0)));
        self.terms = out.into_iter().map(|(_, t)| t).collect();
        Ok(())
    }

    /// Point evaluation: sum of coefficients of the cosets containing x.
    pub fn eval(&self, x: &[Rat]) -> Coeff {
        let mut acc = Coeff::zero();
        for t in &self.terms {
            let inside = t.center.iter().zip(x).all(|(c, xi)| {
                let diff = xi - c;
                match val_p_rat(&diff, self.p) {
                    None => true,
                    Some(v) => v >= t.level as i64,
                }
            });
            if inside {
                acc = acc.add(&t.coeff);
            }
        }
        acc
    }

    /// L2 norm squared: sum |coeff|^2 measure(coset) over the (disjoint)
    /// canonical terms.
    pub fn norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let m = (self.p as f64).powi(-(t.level) * self.n as i32);
                t.coeff.value.norm_sqr() * m
            })
            .sum()
    }

    /// The exact Fourier transform against psi, using the space's trace
    /// pairing (self-dual lattice: the transform of 1_{Z_p^n} is itself).
    pub fn fourier(&self, space: SpaceId, psi: &AdditiveCharacter) -> Result<CosetFunction> {
        assert_eq!(space.dim(), self.n, "space dimension mismatch");
        let p = self.p;
        let n = self.n;
        let mut out = CosetFunction::zero(p, n);
        for term in &self.terms {
            // the transform of coeff 1_{a + p^k Z^n} is
            // coeff p^{-kn} psi(<xd, a>) 1_{p^{-k} Z^n}(xd),
            // expanded into cosets of p^e Z^n on which the phase is constant
            let k = term.level;
            let meas = pow_rat_signed(p, -(k as i64) * n as i64);
            let e = term
                .center
                .iter()
                .map(|c| denom_p_exponent(c, p))
                .max()
                .unwrap_or(0) as i32;
            if k + e <= 0 {
                // phase constant 1 on the whole support p^{-k} Z_p^n
                out.terms.push(CosetTerm {
                    center: vec![Rat::zero(); n],
                    level: -k,
                    coeff: term.coeff.scale_rat(&meas),
                });
                continue;
            }
            let span = (k + e) as u32;
            let count = (p as u128)
                .checked_pow(n as u32 * span)
                .filter(|c| *c <= MAX_TERMS as u128)
                .ok_or_else(|| {
                    Error::PrecisionOverflow("fourier expansion exceeds term cap".into())
                })?;
            let pk_inv = pow_rat_signed(p, -(k as i64));
            let span_mod = (p as u128).pow(span);
            for idx in 0..count {
                // dual center p^{-k} w, w in [0, p^{k+e})^n
                let mut rem = idx;
                let mut center = Vec::with_capacity(n);
                for _ in 0..n {
                    let w = (rem % span_mod) as i64;
                    rem /= span_mod;
                    center.push(&pk_inv * crate::rat_int(w));
                }
                let phase = pairing(space, &Point(center.clone()), &Point(term.center.clone()))?;
                let psi_val = psi.value(&phase, p);
                out.terms.push(CosetTerm {
                    center,
                    level: e,
                    coeff: term.coeff.scale_rat(&meas).mul(&psi_val),
                });
                if out.terms.len() > MAX_TERMS {
                    return Err(Error::PrecisionOverflow(
                        "fourier expansion exceeds term cap".into(),
                    ));
                }
            }
        }
        out.canonicalize()?;
        Ok(out)
    }
}

/// Integer-encoded center key: per coordinate the canonical numerator and
/// the exponent of the p-power denominator. Cheap to sort and hash compared
/// to big-rational keys; coordinates outside the i128 range are refused
/// (the term caps are hit long before that).
type IKey = Vec<(i128, u32)>;

fn coord_ikey(c: &Rat, p: u64) -> Result<(i128, u32)> {
    let e = denom_p_exponent(c, p);
    let pe = BigInt::from(p).pow(e);
    let num = c.numer() * &pe / c.denom();
    let v = num
        .to_i128()
        .ok_or_else(|| Error::PrecisionOverflow("coset center out of i128 range".into()))?;
    Ok((v, e))
}

fn center_ikey(center: &[Rat], p: u64) -> Result<IKey> {
    center.iter().map(|c| coord_ikey(c, p)).collect()
}

/// Canonical key of the key reduced mod p^level.
fn reduce_ikey(key: &IKey, p: u64, level: i32) -> Result<IKey> {
    key.iter()
        .map(|&(num, e)| {
            let span = level as i64 + e as i64;
            if span <= 0 {
                return Ok((0i128, 0u32));
            }
            let m = (p as i128)
                .checked_pow(span as u32)
                .ok_or_else(|| Error::PrecisionOverflow("reduce_ikey".into()))?;
            let mut r = num.rem_euclid(m);
            let mut e = e;
            while e > 0 && r % p as i128 == 0 {
                r /= p as i128;
                e -= 1;
            }
            if r == 0 {
                e = 0;
            }
            Ok((r, e))
        })
        .collect()
}

fn coeff_identical(a: &Coeff, b: &Coeff) -> bool {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => x == y,
        (None, None) => a.value == b.value,
        _ => false,
    }
}

pub(crate) fn pow_rat_signed(p: u64, e: i64) -> Rat {
    let pe = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from(pe)
    } else {
        Rat::new(BigInt::one(), pe)
    }
}

/// Canonical representative of c mod p^k in [0, p^k), respecting p-power
/// denominators; k may be negative.
fn reduce_mod_pk(c: &Rat, p: u64, k: i32) -> Rat {
    let e = denom_p_exponent(c, p) as i64;
    if k as i64 + e <= 0 {
        return Rat::zero();
    }
    let m = BigInt::from(p).pow((k as i64 + e) as u32);
    let a = c.numer() * BigInt::from(p).pow(e as u32) / c.denom();
    let r = ((&a % &m) + &m) % &m;
    Rat::new(r, BigInt::from(p).pow(e as u32))
}

/// Split one coset into its p^n children at the next level.
fn split_coset(p: u64, n: usize, t: &CosetTerm) -> Result<Vec<CosetTerm>> {
    let total = (p as u128)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::PrecisionOverflow("split".into()))?;
    let step = pow_rat_signed(p, t.level as i64);
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rem = idx;
        let mut center = Vec::with_capacity(n);
        for i in 0..n {
            let d = (rem % p as u128) as i64;
            rem /= p as u128;
            center.push(&t.center[i] + &step * crate::rat_int(d));
        }
        out.push(CosetTerm {
            center,
            level: t.level + 1,
            coeff: t.coeff.clone(),
        });
    }
    Ok(out)
}

/// Maximum pointwise |f - g| over a grid refining both functions' supports;
/// the grid walks every finest-level coset inside the union of supports.
/// Lookups go through per-level center indexes, so the cost is
/// grid * levels * log(terms).
pub fn max_pointwise_error(f: &CosetFunction, g: &CosetFunction) -> Result<f64> {
    assert_eq!((f.p, f.n), (g.p, g.n));
    let p = f.p;
    let n = f.n;
    let all: Vec<&CosetTerm> = f.terms.iter().chain(g.terms.iter()).collect();
    if all.is_empty() {
        return Ok(0.0);
    }
    let finest = all.iter().map(|t| t.level).max().unwrap();
    let coarsest = all.iter().map(|t| t.level).min().unwrap().min(0);
    let depth = (finest - coarsest) as u32;
    let volume = (p as u128)
        .checked_pow(n as u32 * depth)
        .filter(|v| *v <= 4_000_000)
        .ok_or_else(|| Error::PrecisionOverflow("comparison grid too large".into()))?;
    let index_f = EvalIndex::build(f)?;
    let index_g = EvalIndex::build(g)?;
    let span_mod = (p as u128).pow(depth);
    let denom_exp = (-coarsest).max(0) as u32;
    let mut max_err: f64 = 0.0;
    for idx in 0..volume {
        let mut rem = idx;
        let mut key: IKey = Vec::with_capacity(n);
        for _ in 0..n {
            let w = (rem % span_mod) as i128;
            rem /= span_mod;
            // x = w p^{coarsest}: numerator w p^{coarsest+denom_exp}, denominator exponent denom_exp
            let mut num = w;
            let mut e = denom_exp;
            if coarsest > 0 {
                num *= (p as i128).pow(coarsest as u32);
            }
            while e > 0 && num % p as i128 == 0 {
                num /= p as i128;
                e -= 1;
            }
            if num == 0 {
                e = 0;
            }
            key.push((num, e));
        }
        let d = index_f.eval(p, &key) - index_g.eval(p, &key);
        max_err = max_err.max(d.norm());
    }
    Ok(max_err)
}

/// Per-level reduced-center lookup table for fast point evaluation.
struct EvalIndex {
    levels: Vec<(i32, std::collections::BTreeMap<IKey, C64>)>,
}

impl EvalIndex {
    fn build(f: &CosetFunction) -> Result<Self> {
        let mut levels: std::collections::BTreeMap<i32, std::collections::BTreeMap<IKey, C64>> =
            std::collections::BTreeMap::new();
        for t in &f.terms {
            *levels
                .entry(t.level)
                .or_default()
                .entry(center_ikey(&t.center, f.p)?)
                .or_insert(C64::new(0.0, 0.0)) += t.coeff.value;
        }
        Ok(EvalIndex {
            levels: levels.into_iter().collect(),
        })
    }

    fn eval(&self, p: u64, key: &IKey) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (level, map) in &self.levels {
            if let Ok(reduced) = reduce_ikey(key, p, *level) {
                if let Some(v) = map.get(&reduced) {
                    acc += v;
                }
            }
        }
        acc
    }
}

/// Deterministic random coset functions for the transform test corpus.
pub fn random_coset_function(
    space: SpaceId,
    p: u64,
    max_terms: usize,
    max_level: i32,
    rng: &mut SplitMix64,
) -> CosetFunction {
    let n = space.dim();
    let nterms = 1 + rng.below(max_terms as u64) as usize;
    let mut f = CosetFunction::zero(p, n);
    for _ in 0..nterms {
        let level = rng.below(max_level as u64 + 1) as i32;
        let modulus = (p as i64).pow(level as u32);
        let center: Vec<Rat> = (0..n)
            .map(|_| crate::rat_int(rng.below(modulus.max(1) as u64) as i64))
            .collect();
        let coeff = if rng.below(4) == 0 {
            Coeff::from_complex(C64::new(
                rng.unit_f64() * 2.0 - 1.0,
                rng.unit_f64() * 2.0 - 1.0,
            ))
        } else {
            Coeff::from_rat(crate::rat(rng.range_i64(-4, 4), rng.range_i64(1, 4)))
        };
        f.terms.push(CosetTerm {
            center,
            level,
            coeff,
        });
    }
    f.canonicalize().expect("corpus canonicalization");
    f
}

/// Involution and Plancherel checks over a random corpus; returns the maximum
/// pointwise double-transform error and the maximum relative norm drift.
pub fn fourier_check(trials: u64, seed: u64) -> Result<(f64, f64)> {
    let mut rng = SplitMix64::new(seed);
    let mut max_inv: f64 = 0.0;
    let mut max_plan: f64 = 0.0;
    for i in 0..trials {
        // mostly 1-dimensional functions at p in {2,3,5}, with 4-dimensional
        // low-level cases mixed in (the p = 3 matrix case is the expensive
        // one: 6561-term intermediate expansions)
        let (space, p, max_level) = match i % 10 {
            0 | 5 => (SpaceId::Tate, 2, 3),
            1 | 6 => (SpaceId::Tate, 3, 3),
            2 | 7 => (SpaceId::Tate, 5, 2),
            3 | 8 | 4 => (SpaceId::Matrix2, 2, 1),
            _ => {
                if i % 20 == 9 {
                    (SpaceId::Matrix2, 3, 1)
                } else {
                    (SpaceId::Tate, 3, 2)
                }
            }
        };
        let f = random_coset_function(space, p, 8, max_level, &mut rng);
        let fhat = f.fourier(space, &AdditiveCharacter::standard())?;
        let back = fhat.fourier(space, &AdditiveCharacter::inverse())?;
        max_inv = max_inv.max(max_pointwise_error(&f, &back)?);
        let (n0, n1) = (f.norm_sq(), fhat.norm_sq());
        if n0 > 0.0 {
            max_plan = max_plan.max(((n1 - n0) / n0).abs());
        }
    }
    Ok((max_inv, max_plan))
}
