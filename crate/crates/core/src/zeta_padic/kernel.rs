//! Exact enumeration kernels for valuation censuses.
//!
//! Counting is over integer lifts with i128 arithmetic; all contributions are
//! exact rationals with denominator dividing p^(n(m_max+1)), accumulated as
//! u128 numerators so worker merges are plain integer addition and results
//! are bit-identical for any thread count.
//!
//! The branch-lift strategy is a depth-first refinement over residue levels
//! with two exits below the expansion ceiling:
//!
//! - a node whose invariant value has valuation v < level is a leaf: the
//!   whole fiber has val f = v (stability of truncated valuations);
//! - at the ceiling L (chosen so 2L - 1 >= m_max), the fiber decomposes
//!   exactly through the first-order Taylor expansion: writing
//!   f(x + p^L z) = f(x) + p^L grad f(x) . z + O(p^{2L}), the image of
//!   grad f(x) . z is p^e times a uniform unit-direction coordinate, so the
//!   valuation distribution inside the fiber is a point mass or an explicit
//!   geometric tail. Everything needed (f(x), grad f(x)) is an exact integer
//!   of the lift, so the contributed masses are exact.
//!
//! Lifting every frontier residue through all p^n refinements up to level
//! m_max + 1 would cost ~10^11 evaluations for the cube space at p = 2,
//! m_max = 4; the Taylor exit brings the same exact census down to ~10^7.

use crate::arith::val_p_i128;
use crate::error::{Error, Result};
use crate::pvs::SpaceId;
use crate::Rat;
use num_bigint::BigInt;

/// Largest canonical-lift magnitude per space keeping every intermediate of
/// the invariant and gradient kernels inside i128: the cube's quartic needs
/// 32 B^4 < 2^127, the quadratic spaces allow far deeper lifts.
pub(crate) fn max_coord_base(space: SpaceId) -> u64 {
    match space {
        SpaceId::Tate => 1 << 62,
        SpaceId::Matrix2 => 1 << 60,
        SpaceId::CubeSplit => 1 << 30,
    }
}

/// Evaluate the basic invariant on integer coordinates.
#[inline]
pub(crate) fn eval_f(space: SpaceId, x: &[i128]) -> i128 {
    match space {
        SpaceId::Tate => x[0],
        SpaceId::Matrix2 => x[0] * x[3] - x[1] * x[2],
        SpaceId::CubeSplit => {
            let a = x[0] * x[3] - x[1] * x[2];
            let c = x[4] * x[7] - x[5] * x[6];
            let b = x[0] * x[7] - x[1] * x[6] - x[2] * x[5] + x[3] * x[4];
            b * b - 4 * a * c
        }
    }
}

/// Gradient of the invariant on integer coordinates.
#[inline]
pub(crate) fn eval_grad(space: SpaceId, x: &[i128], out: &mut [i128; 8]) {
    match space {
        SpaceId::Tate => out[0] = 1,
        SpaceId::Matrix2 => {
            out[0] = x[3];
            out[1] = -x[2];
            out[2] = -x[1];
            out[3] = x[0];
        }
        SpaceId::CubeSplit => {
            let a = x[0] * x[3] - x[1] * x[2];
            let c = x[4] * x[7] - x[5] * x[6];
            let b = x[0] * x[7] - x[1] * x[6] - x[2] * x[5] + x[3] * x[4];
            let b2 = 2 * b;
            out[0] = b2 * x[7] - 4 * c * x[3];
            out[1] = -b2 * x[6] + 4 * c * x[2];
            out[2] = -b2 * x[5] + 4 * c * x[1];
            out[3] = b2 * x[4] - 4 * c * x[0];
            out[4] = b2 * x[3] - 4 * a * x[7];
            out[5] = -b2 * x[2] + 4 * a * x[6];
            out[6] = -b2 * x[1] + 4 * a * x[5];
            out[7] = b2 * x[0] - 4 * a * x[4];
        }
    }
}

/// Exact accumulator: numerators of c_m over the common denominator
/// p^(n(m_max+1)), plus an escape hatch for contributions that do not fit
/// the power grid (not reachable for the catalog spaces, kept for safety).
pub(crate) struct Accum {
    pub counts: Vec<u128>,
    pub slow: Vec<(usize, Rat)>,
    pub evals: u64,
    m_max: u32,
    n: usize,
    p: u64,
    /// common denominator exponent is n * den_levels
    den_levels: u32,
    /// p^j as u128 for j <= n * den_levels
    pow: Vec<u128>,
    /// optional stratified counts by unit class, flattened [m][class], in
    /// units of 1/(p^(n den_levels) * nclasses)
    pub strat: Option<Vec<u128>>,
    /// stratified-only: mass per valuation whose unit class the first-order
    /// fiber data does not pin (deeply singular gradient); counted in
    /// `counts` but in no class row
    pub pending: Option<Vec<u128>>,
    nclasses: usize,
}

impl Accum {
    pub fn new(space_n: usize, p: u64, m_max: u32, den_levels: u32) -> Result<Self> {
        Self::with_strata(space_n, p, m_max, den_levels, false)
    }

    pub fn with_strata(
        space_n: usize,
        p: u64,
        m_max: u32,
        den_levels: u32,
        stratified: bool,
    ) -> Result<Self> {
        debug_assert!(den_levels >= m_max + 1);
        let top = space_n as u32 * den_levels;
        let mut pow = Vec::with_capacity(top as usize + 1);
        let mut acc: u128 = 1;
        pow.push(acc);
        for _ in 0..top {
            acc = acc
                .checked_mul(p as u128)
                .filter(|v| *v < (1u128 << 124))
                .ok_or_else(|| Error::PrecisionOverflow(format!("p^{}", top)))?;
            pow.push(acc);
        }
        let nclasses = unit_class_count(p);
        Ok(Accum {
            counts: vec![0u128; m_max as usize + 1],
            slow: Vec::new(),
            evals: 0,
            m_max,
            n: space_n,
            p,
            den_levels,
            pow,
            strat: if stratified {
                Some(vec![0u128; (m_max as usize + 1) * nclasses])
            } else {
                None
            },
            pending: if stratified {
                Some(vec![0u128; m_max as usize + 1])
            } else {
                None
            },
            nclasses,
        })
    }

    fn den_exp(&self) -> u32 {
        self.n as u32 * self.den_levels
    }

    /// Whole fiber at level k has val f = j: mass p^{-nk}. `unit` is the
    /// unit part of the witness lift and `unit_bits` how many p-adic digits
    /// of it the fiber pins; for p = 2 a fiber that pins fewer than the 3
    /// digits of the mod-8 class spreads uniformly over the compatible
    /// classes (callers only pass partial digits when the residual
    /// direction is Haar-uniform).
    #[inline]
    pub fn whole_node(&mut self, j: u32, k: u32, unit: i128, unit_bits: u32) {
        if j > self.m_max {
            return;
        }
        let exp = self.den_exp() as i64 - (self.n as u32 * k) as i64;
        debug_assert!(exp >= 0);
        self.counts[j as usize] += self.pow[exp as usize];
        if let Some(strat) = &mut self.strat {
            let mass = self.pow[exp as usize] * self.nclasses as u128;
            if self.p != 2 || unit_bits >= 3 {
                let cls = unit_class_index(self.p, unit);
                strat[j as usize * self.nclasses + cls] += mass;
            } else {
                // classes compatible with unit mod 2^unit_bits, evenly
                debug_assert!(unit_bits >= 1);
                let step = 1i128 << unit_bits;
                let variants = 8 >> unit_bits;
                let share = mass / variants as u128;
                for t in 0..variants {
                    let u = unit + t as i128 * step;
                    strat[j as usize * self.nclasses + unit_class_index(2, u)] += share;
                }
            }
        }
    }

    /// Whole fiber with known valuation but undetermined unit class.
    #[inline]
    pub fn whole_node_class_pending(&mut self, j: u32, k: u32) {
        if j > self.m_max {
            return;
        }
        let exp = self.den_exp() as i64 - (self.n as u32 * k) as i64;
        debug_assert!(exp >= 0);
        self.counts[j as usize] += self.pow[exp as usize];
        if let Some(pending) = &mut self.pending {
            pending[j as usize] += self.pow[exp as usize];
        }
    }

    /// Geometric slice: mass p^{-nk} (1 - 1/p) p^{-i} at val j = base + i.
    /// The unit part is Haar-uniform, so the mass splits evenly over the
    /// unit classes.
    #[inline]
    pub fn geometric(&mut self, j: u32, k: u32, i: u32) {
        if j > self.m_max {
            return;
        }
        let exp = self.den_exp() as i64 - (self.n as u32 * k) as i64 - i as i64 - 1;
        if exp >= 0 {
            self.counts[j as usize] += (self.p as u128 - 1) * self.pow[exp as usize];
            if let Some(strat) = &mut self.strat {
                for cls in 0..self.nclasses {
                    strat[j as usize * self.nclasses + cls] +=
                        (self.p as u128 - 1) * self.pow[exp as usize];
                }
            }
        } else {
            // p^{-nk}(p-1)p^{-(i+1)} exactly, off the u128 grid
            let num = BigInt::from(self.p - 1);
            let den = BigInt::from(self.p).pow(self.n as u32 * k + i + 1);
            self.slow.push((j as usize, Rat::new(num, den)));
            assert!(
                self.strat.is_none(),
                "stratified censuses stay on the u128 grid"
            );
        }
    }

    pub fn merge(&mut self, other: Accum) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        match (&mut self.strat, other.strat) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (None, None) => {}
            _ => unreachable!("stratification mismatch in merge"),
        }
        match (&mut self.pending, other.pending) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (None, None) => {}
            _ => unreachable!("stratification mismatch in merge"),
        }
        self.slow.extend(other.slow);
        self.evals += other.evals;
    }

    /// Class-undetermined mass per valuation, exact.
    pub fn finish_pending(&self) -> Vec<Rat> {
        let pending = self.pending.as_ref().expect("stratified accumulator");
        let den = BigInt::from(self.p).pow(self.den_exp());
        pending
            .iter()
            .map(|&num| Rat::new(bigint_from_u128(num), den.clone()))
            .collect()
    }

    /// Stratified entries rows[m][class], exact.
    pub fn finish_stratified(&self) -> Vec<Vec<Rat>> {
        let strat = self.strat.as_ref().expect("stratified accumulator");
        let den = BigInt::from(self.p).pow(self.den_exp()) * BigInt::from(self.nclasses as u64);
        (0..=self.m_max as usize)
            .map(|m| {
                (0..self.nclasses)
                    .map(|cls| {
                        Rat::new(
                            bigint_from_u128(strat[m * self.nclasses + cls]),
                            den.clone(),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// Final exact census entries c_0..c_m_max.
    pub fn finish(self) -> Vec<Rat> {
        let den = BigInt::from(self.p).pow(self.den_exp());
        let mut out: Vec<Rat> = self
            .counts
            .iter()
            .map(|&num| Rat::new(bigint_from_u128(num), den.clone()))
            .collect();
        for (j, r) in self.slow {
            out[j] += r;
        }
        out
    }
}

fn bigint_from_u128(v: u128) -> BigInt {
    BigInt::from(v)
}

/// unit part f / p^v of an exact nonzero integer value
#[inline]
pub(crate) fn unit_of(p: u64, f: i128, v: u32) -> i128 {
    f / (p as i128).pow(v)
}

/// Number of unit classes tracked per prime: units mod 8 for p = 2 (the
/// square-class-relevant data), quadratic residue vs not for odd p.
pub(crate) fn unit_class_count(p: u64) -> usize {
    if p == 2 {
        4
    } else {
        2
    }
}

pub(crate) fn unit_class_index(p: u64, unit: i128) -> usize {
    if p == 2 {
        let u = (((unit % 8) + 8) % 8) as u64;
        debug_assert!(u % 2 == 1);
        ((u - 1) / 2) as usize
    } else {
        let u = (((unit % p as i128) + p as i128) % p as i128) as u64;
        debug_assert!(u != 0);
        if crate::arith::pow_mod_u64(u, (p - 1) / 2, p) == 1 {
            0
        } else {
            1
        }
    }
}

/// Human-readable unit class labels, aligned with [`unit_class_index`].
pub(crate) fn unit_class_labels(p: u64) -> Vec<String> {
    if p == 2 {
        vec!["1".into(), "3".into(), "5".into(), "7".into()]
    } else {
        vec!["1".into(), "u".into()]
    }
}

pub(crate) struct DfsParams {
    pub space: SpaceId,
    pub p: u64,
    pub n: usize,
    pub m_max: u32,
    /// expansion ceiling: nodes at level >= ceiling resolve analytically
    pub ceiling: u32,
    pub budget: u128,
}

impl DfsParams {
    pub fn new(space: SpaceId, p: u64, m_max: u32, budget: u128) -> Self {
        // smallest L with 2L - 1 >= m_max (and at least 1)
        let ceiling = ((m_max + 2) / 2).max(1);
        DfsParams {
            space,
            p,
            n: space.dim(),
            m_max,
            ceiling,
            budget,
        }
    }

    /// p^k for coordinate lifts.
    pub fn pk(&self, k: u32) -> i128 {
        (self.p as i128).pow(k)
    }
}

/// Recursive refinement of one node. `coords` is the canonical lift (entries
/// in [0, p^k)), `k >= 1` its level. Contributions and evaluation counts go
/// into `acc`; errors out when the budget is exhausted.
pub(crate) fn process_node(
    params: &DfsParams,
    coords: &mut [i128; 8],
    k: u32,
    acc: &mut Accum,
) -> Result<()> {
    acc.evals += 1;
    if acc.evals > params.budget as u64 {
        return Err(Error::BudgetExceeded {
            needed: acc.evals as u128,
            budget: params.budget,
        });
    }
    let f = eval_f(params.space, coords);
    let v0 = val_p_i128(f, params.p);
    if let Some(v) = v0 {
        if v < k {
            // valuation stable on the whole fiber; the unit part is pinned
            // mod p^{k-v} outright, and mod p^{min(k+e,2k)-v} through the
            // first-order term
            let unit = unit_of(params.p, f, v);
            if acc.strat.is_none() || params.p != 2 || k - v >= 3 {
                acc.whole_node(v, k, unit, 3);
                return Ok(());
            }
            let mut grad = [0i128; 8];
            eval_grad(params.space, coords, &mut grad);
            acc.evals += 1;
            let e = grad[..params.n]
                .iter()
                .filter_map(|&g| val_p_i128(g, params.p))
                .min();
            match e {
                Some(e) if e < k => {
                    // residual direction is uniform: partial digits split
                    let bits = (k + e - v).min(3);
                    acc.whole_node(v, k, unit, bits);
                    return Ok(());
                }
                _ => {
                    if 2 * k - v >= 3 {
                        // second-order remainder cannot move the class
                        acc.whole_node(v, k, unit, 3);
                        return Ok(());
                    }
                    // deeply singular: refine until the class is pinned
                }
            }
        }
    }
    if k >= params.ceiling && !(matches!(v0, Some(v) if v < k)) {
        resolve_taylor(params, coords, k, f, v0, acc);
        return Ok(());
    }
    // expand the p^n children x + p^k delta
    let step = params.pk(k);
    let n = params.n;
    let mut delta = [0u32; 8];
    loop {
        process_node(params, coords, k + 1, acc)?;
        // odometer over delta, updating coords in place
        let mut i = 0;
        loop {
            if i == n {
                // roll over complete: restore and stop
                return Ok(());
            }
            if delta[i] + 1 < params.p as u32 {
                delta[i] += 1;
                coords[i] += step;
                break;
            }
            coords[i] -= (params.p as u32 - 1) as i128 * step;
            delta[i] = 0;
            i += 1;
        }
    }
}

/// Exact fiber resolution at the ceiling via the first-order expansion.
/// A stratified point mass whose unit class the data does not pin (deeply
/// singular gradient at p = 2) is booked as class-pending; refining it
/// instead would fan out p^n children per node on the singular locus.
fn resolve_taylor(
    params: &DfsParams,
    coords: &[i128; 8],
    k: u32,
    f: i128,
    v0: Option<u32>,
    acc: &mut Accum,
) {
    let mut grad = [0i128; 8];
    eval_grad(params.space, coords, &mut grad);
    acc.evals += 1;
    let e = grad[..params.n]
        .iter()
        .filter_map(|&g| val_p_i128(g, params.p))
        .min();
    match e {
        Some(e) if e < k => {
            // f(y) = p^{k+e} (alpha + uniform), alpha = f / p^{k+e}
            match v0 {
                Some(phi) if phi < k + e => {
                    // constant valuation; unit pinned mod p^{k+e-phi}, the
                    // rest of the digits uniform (unit direction)
                    let bits = (k + e - phi).min(3);
                    acc.whole_node(phi, k, unit_of(params.p, f, phi), bits);
                }
                _ => {
                    // geometric from k + e
                    let base = k + e;
                    let mut i = 0u32;
                    while base + i <= params.m_max {
                        acc.geometric(base + i, k, i);
                        i += 1;
                    }
                }
            }
        }
        _ => {
            // gradient vanishes to depth >= k: f(y) = f mod p^{2k}
            if let Some(phi) = v0 {
                if phi < 2 * k {
                    if acc.strat.is_some() && params.p == 2 && 2 * k - phi < 3 {
                        acc.whole_node_class_pending(phi, k);
                    } else {
                        acc.whole_node(phi, k, unit_of(params.p, f, phi), 3);
                    }
                }
                // phi >= 2k: val >= 2k > m_max, nothing to record
            }
            // v0 = None: val >= 2k > m_max likewise
        }
    }
}
