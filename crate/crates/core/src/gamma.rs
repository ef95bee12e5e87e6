//! Zeta integrals of coset functions and gamma-factor extraction from the
//! local functional equation.
//!
//! For a test function xi, the primal zeta Z(xi)(t) and the dual-side zeta
//! of its Fourier transform combine into
//!
//!   gamma(t) = Z_dual(F_psi xi)(p^{2 lambda_0} / t) / Z(xi)(t),
//!
//! where lambda_0 is the catalog density shift: the dual side is evaluated
//! at -s - 2 lambda_0 in the classical exponent, the scalar-valued
//! translation of the half-density functional equation. gamma must not
//! depend on the test function; the extractor computes it per function and
//! reports the largest pairwise discrepancy as the residual.
//!
//! In self-dual coordinates the dual basic invariant is the same polynomial,
//! so both sides run through the same census machinery; `Side` records which
//! action the integral is equivariant for, which matters to callers, not to
//! the integrand.

use crate::arith::{LaurentRat, RatPoly};
use crate::error::{Error, Result};
use crate::pvs::{density_shift, SpaceId};
use crate::schwartz::{
    denom_p_exponent, pow_rat_signed, rat_to_f64, AdditiveCharacter, CosetFunction,
};
use crate::zeta_padic::{census_exact_on_coset, zeta_from_census, CensusOptions, Strategy};
use crate::{C64, Rat};
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Primal,
    Dual,
}

/// A rational function with complex numerator over an exact denominator,
/// times t^shift. Appears when test functions develop genuinely complex
/// character coefficients.
#[derive(Clone, Debug)]
pub struct ComplexLaurent {
    pub shift: i64,
    pub num: Vec<C64>,
    pub den: RatPoly,
}

impl ComplexLaurent {
    fn from_exact(l: &LaurentRat) -> Self {
        ComplexLaurent {
            shift: l.shift,
            num: l
                .fun
                .num()
                .coeffs()
                .iter()
                .map(|c| C64::new(rat_to_f64(c), 0.0))
                .collect(),
            den: l.fun.den().clone(),
        }
    }

    fn scale(&self, c: C64) -> Self {
        ComplexLaurent {
            shift: self.shift,
            num: self.num.iter().map(|a| a * c).collect(),
            den: self.den.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.norm() == 0.0)
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let shift = self.shift.min(other.shift);
        let a = shift_up_c(&self.num, (self.shift - shift) as usize);
        let b = shift_up_c(&other.num, (other.shift - shift) as usize);
        if self.den == other.den {
            return ComplexLaurent {
                shift,
                num: add_c(&a, &b),
                den: self.den.clone(),
            };
        }
        let num = add_c(&mul_c_rat(&a, &other.den), &mul_c_rat(&b, &self.den));
        ComplexLaurent {
            shift,
            num,
            den: self.den.mul(&other.den),
        }
    }

    /// Substitute t -> c/t with exact rational c.
    fn substitute_inverse(&self, c: &Rat) -> Self {
        let dn = self.num.len().saturating_sub(1);
        let dd = self.den.coeffs().len().saturating_sub(1);
        // num(c/t) = t^{-dn} sum num_i c^i t^{dn-i}
        let mut num = vec![C64::new(0.0, 0.0); dn + 1];
        let mut pow = Rat::one();
        for (i, a) in self.num.iter().enumerate() {
            num[dn - i] = a * rat_to_f64(&pow);
            pow *= c;
        }
        let (den, _) = self.den.compose_inverse_scale(c);
        let cshift = pow_rat_exact(c, self.shift);
        let scale = rat_to_f64(&cshift);
        ComplexLaurent {
            shift: dd as i64 - dn as i64 - self.shift,
            num: num.iter().map(|a| a * scale).collect(),
            den,
        }
    }
}

fn pow_rat_exact(c: &Rat, e: i64) -> Rat {
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

fn shift_up_c(v: &[C64], k: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); k];
    out.extend_from_slice(v);
    out
}

fn add_c(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or(C64::new(0.0, 0.0))
                + b.get(i).copied().unwrap_or(C64::new(0.0, 0.0))
        })
        .collect()
}

fn rat_poly_to_c(p: &RatPoly) -> Vec<C64> {
    p.coeffs()
        .iter()
        .map(|r| C64::new(rat_to_f64(r), 0.0))
        .collect()
}

fn mul_c_rat(a: &[C64], b: &RatPoly) -> Vec<C64> {
    mul_c_c(a, &rat_poly_to_c(b))
}

fn mul_c_c(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The zeta integral of a coset function: exact when every coefficient is
/// exactly rational, complex-over-exact otherwise.
#[derive(Clone, Debug)]
pub enum CosetZeta {
    Exact(LaurentRat),
    Mixed(ComplexLaurent),
}

impl CosetZeta {
    pub fn is_zero(&self) -> bool {
        match self {
            CosetZeta::Exact(l) => l.is_zero(),
            CosetZeta::Mixed(m) => m.is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&LaurentRat> {
        match self {
            CosetZeta::Exact(l) => Some(l),
            CosetZeta::Mixed(_) => None,
        }
    }

    fn to_complex(&self) -> ComplexLaurent {
        match self {
            CosetZeta::Exact(l) => ComplexLaurent::from_exact(l),
            CosetZeta::Mixed(m) => m.clone(),
        }
    }
}

/// A gamma candidate: exact Laurent rational, or an unreduced complex
/// numerator/denominator pair (no float polynomial gcd is ever attempted;
/// comparisons cross-multiply instead).
#[derive(Clone, Debug)]
enum GammaCandidate {
    Exact(LaurentRat),
    Complex {
        shift: i64,
        num: Vec<C64>,
        den: Vec<C64>,
    },
}

fn candidate_parts(c: &GammaCandidate) -> (i64, Vec<C64>, Vec<C64>) {
    match c {
        GammaCandidate::Exact(l) => (
            l.shift,
            rat_poly_to_c(l.fun.num()),
            rat_poly_to_c(l.fun.den()),
        ),
        GammaCandidate::Complex { shift, num, den } => (*shift, num.clone(), den.clone()),
    }
}

fn cross_residual(a: &GammaCandidate, b: &GammaCandidate) -> f64 {
    let (sa, na, da) = candidate_parts(a);
    let (sb, nb, db) = candidate_parts(b);
    // a = t^sa na/da equals b = t^sb nb/db iff t^sa na db == t^sb nb da
    let left = mul_c_c(&na, &db);
    let right = mul_c_c(&nb, &da);
    let s = sa.min(sb);
    let left = shift_up_c(&left, (sa - s) as usize);
    let right = shift_up_c(&right, (sb - s) as usize);
    let n = left.len().max(right.len());
    let scale = left
        .iter()
        .chain(right.iter())
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let l = left.get(i).copied().unwrap_or(C64::new(0.0, 0.0));
        let r = right.get(i).copied().unwrap_or(C64::new(0.0, 0.0));
        worst = worst.max((l - r).norm());
    }
    worst / scale
}

/// Zeta integral of |f|^s against a coset function, term by term.
///
/// A term supported on c + p^k Z_p^n with c having p-power denominators is
/// reduced to an integral coset by the substitution x = p^{-E} u, which
/// multiplies the integral by p^{nE} t^{-E deg f}; the integral-coset census
/// then reconstructs exactly. `num_deg`/`den_deg` bound the reconstruction
/// degrees of the underlying full-space zeta; shifted cosets automatically
/// get their numerator allowance extended by the observed leading valuation.
pub fn zeta_of_cosetfn(
    space: SpaceId,
    xi: &CosetFunction,
    _side: Side,
    num_deg: usize,
    den_deg: usize,
    opts: &CensusOptions,
) -> Result<CosetZeta> {
    assert_eq!(space.dim(), xi.n);
    let p = xi.p;
    let d = space.invariant_degree() as i64;
    let zero = LaurentRat::new(0, RatPoly::zero(), RatPoly::one()).unwrap();
    let mut exact_acc: Option<LaurentRat> = Some(zero);
    let mut mixed_acc: Option<ComplexLaurent> = None;
    for term in &xi.terms {
        let e = term
            .center
            .iter()
            .map(|c| denom_p_exponent(c, p))
            .max()
            .unwrap_or(0) as i64;
        let scale_e = e.max(-(term.level as i64)).max(0);
        let level_i = term.level as i64 + scale_e;
        debug_assert!(level_i >= 0);
        let pe = pow_rat_signed(p, scale_e);
        let center: Vec<i64> = term
            .center
            .iter()
            .map(|c| {
                let v = c * &pe;
                debug_assert!(v.denom().is_one());
                v.numer().to_i64().expect("coset center fits i64")
            })
            .collect();
        let zterm = integral_coset_zeta(space, p, &center, level_i as u32, num_deg, den_deg, opts)?;
        // x = p^{-E} u: measure p^{nE}, |f|^s gains t^{-E d}
        let measure = pow_rat_signed(p, scale_e * xi.n as i64);
        let shifted = LaurentRat {
            shift: zterm.shift - scale_e * d,
            fun: zterm.fun.scale(&measure),
        };
        match (&term.coeff.exact, &mut exact_acc) {
            (Some(r), Some(acc)) => {
                let new = acc.add(&shifted.scale(r));
                exact_acc = Some(new);
            }
            _ => {
                let mut cacc = match (mixed_acc.take(), exact_acc.take()) {
                    (Some(m), _) => m,
                    (None, Some(a)) => ComplexLaurent::from_exact(&a),
                    (None, None) => unreachable!(),
                };
                let contrib = ComplexLaurent::from_exact(&shifted).scale(term.coeff.value);
                cacc = cacc.add(&contrib);
                mixed_acc = Some(cacc);
            }
        }
    }
    Ok(match (exact_acc, mixed_acc) {
        (Some(a), None) => CosetZeta::Exact(a),
        (_, Some(m)) => CosetZeta::Mixed(m),
        _ => unreachable!(),
    })
}

/// Exact zeta of an integral coset, with the numerator allowance extended by
/// the leading valuation observed on the coset.
fn integral_coset_zeta(
    space: SpaceId,
    p: u64,
    center: &[i64],
    level: u32,
    num_deg: usize,
    den_deg: usize,
    opts: &CensusOptions,
) -> Result<LaurentRat> {
    let probe_m = (den_deg + 3) as u32;
    let mut census =
        census_exact_on_coset(space, p, center, level, probe_m, Strategy::BranchLift, opts)?;
    let mut v_min = census.entries.iter().position(|e| !e.c.is_zero());
    if v_min.is_none() {
        // everything so far has higher valuation; look deeper once
        let deep_m = probe_m + 2 * space.invariant_degree() * (level + 1);
        census =
            census_exact_on_coset(space, p, center, level, deep_m, Strategy::BranchLift, opts)?;
        v_min = census.entries.iter().position(|e| !e.c.is_zero());
    }
    let Some(v_min) = v_min else {
        return LaurentRat::new(0, RatPoly::zero(), RatPoly::one());
    };
    let num_allow = num_deg + v_min;
    let holdout = 2usize;
    let m_need = (num_allow + den_deg + holdout) as u32;
    if m_need > census.m_max {
        census =
            census_exact_on_coset(space, p, center, level, m_need, Strategy::BranchLift, opts)?;
    }
    let z = zeta_from_census(&census, num_allow, den_deg, holdout)?;
    Ok(LaurentRat::from_fun(z.zeta))
}

/// Report from gamma extraction.
#[derive(Clone, Debug)]
pub struct GammaReport {
    pub space: SpaceId,
    pub p: u64,
    /// Canonical gamma as an exact Laurent rational function of t = p^{-s}.
    pub gamma: LaurentRat,
    /// Largest pairwise cross-multiplied coefficient discrepancy.
    pub residual: f64,
    pub test_functions: usize,
    /// Set when only one test function was supplied (no cross-check).
    pub unconfirmed: bool,
    /// The lambda shift 2*lambda_0 applied to the dual argument.
    pub dual_shift: Rat,
    /// With the half-density flag: lambda_0, and whether the substitution
    /// t -> p^{lambda_0} t was folded exactly into `gamma` (possible only
    /// for integral lambda_0; otherwise gamma stays in the scalar
    /// normalization and the shift is reported for the caller).
    pub half_density_shift: Option<Rat>,
    pub half_density_folded: bool,
}

/// Default reconstruction degrees per space (full-space zeta shapes).
fn base_degrees(space: SpaceId) -> (usize, usize) {
    match space {
        SpaceId::Tate => (1, 1),
        SpaceId::Matrix2 => (2, 2),
        SpaceId::CubeSplit => (4, 4),
    }
}

/// Extract the scalar gamma factor from >= 1 test functions.
///
/// The cube space has several open orbits and a gamma matrix; scalar
/// extraction is restricted to tate and matrix2 (see [`gamma_matrix_probe`]).
pub fn gamma_extract(
    space: SpaceId,
    p: u64,
    test_functions: &[CosetFunction],
    psi: &AdditiveCharacter,
    half_density: bool,
    tolerance: f64,
    opts: &CensusOptions,
) -> Result<GammaReport> {
    if space == SpaceId::CubeSplit {
        return Err(Error::WrongSpace("cube-split (use the gamma matrix probe)"));
    }
    if test_functions.is_empty() {
        return Err(Error::EmptyTestFunction);
    }
    let (num_deg, den_deg) = base_degrees(space);
    let lambda0 = density_shift(space);
    // 2 lambda_0 = n/d is integral for every catalog space
    let two_lambda0 = (&lambda0 * crate::rat_int(2))
        .to_integer()
        .to_i64()
        .expect("2 lambda_0 integral");
    let shift_c = pow_rat_signed(p, two_lambda0);

    let mut candidates: Vec<GammaCandidate> = Vec::new();
    for xi in test_functions {
        let primal = zeta_of_cosetfn(space, xi, Side::Primal, num_deg, den_deg, opts)?;
        if primal.is_zero() {
            return Err(Error::EmptyTestFunction);
        }
        let xhat = xi.fourier(space, psi)?;
        let dual = zeta_of_cosetfn(space, &xhat, Side::Dual, num_deg, den_deg, opts)?;
        let gamma = match (&primal, &dual) {
            (CosetZeta::Exact(zp), CosetZeta::Exact(zd)) => {
                GammaCandidate::Exact(zd.substitute_inverse(&shift_c).div(zp)?)
            }
            _ => {
                let zd = dual.to_complex().substitute_inverse(&shift_c);
                let zp = primal.to_complex();
                GammaCandidate::Complex {
                    shift: zd.shift - zp.shift,
                    num: mul_c_rat(&zd.num, &zp.den),
                    den: mul_c_rat(&zp.num, &zd.den),
                }
            }
        };
        candidates.push(gamma);
    }

    let mut residual: f64 = 0.0;
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            residual = residual.max(cross_residual(&candidates[i], &candidates[j]));
        }
    }
    if residual > tolerance {
        return Err(Error::InconsistentGamma { residual });
    }
    let exact = candidates
        .iter()
        .find_map(|g| match g {
            GammaCandidate::Exact(l) => Some(l.clone()),
            GammaCandidate::Complex { .. } => None,
        })
        .ok_or(Error::NoExactGamma)?;

    let mut gamma = exact;
    let mut folded = false;
    if half_density && lambda0.denom().is_one() {
        // gamma_hd(lambda) = gamma_scalar(lambda - lambda_0): in t this is
        // t -> p^{lambda_0} t, exact for integral lambda_0
        let c = pow_rat_signed(p, lambda0.to_integer().to_i64().unwrap());
        let num = gamma.fun.num().compose_scale(&c);
        let den = gamma.fun.den().compose_scale(&c);
        let cshift = pow_rat_exact(&c, gamma.shift);
        gamma = LaurentRat::new(gamma.shift, num.scale(&cshift), den)?;
        folded = true;
    }
    Ok(GammaReport {
        space,
        p,
        gamma,
        residual,
        test_functions: test_functions.len(),
        unconfirmed: test_functions.len() < 2,
        dual_shift: Rat::from(num_bigint::BigInt::from(two_lambda0)),
        half_density_shift: if half_density { Some(lambda0) } else { None },
        half_density_folded: folded,
    })
}

/// Default gamma test functions per space: the unit ball, a coset around a
/// unit point, and the shrunk ball.
pub fn default_test_functions(space: SpaceId, p: u64) -> Result<Vec<CosetFunction>> {
    let n = space.dim();
    let unit_center: Vec<i64> = match space {
        SpaceId::Tate => vec![1],
        SpaceId::Matrix2 => vec![1, 0, 0, 1],
        SpaceId::CubeSplit => vec![1, 0, 0, 1, 1, 0, 0, -1],
    };
    Ok(vec![
        CosetFunction::indicator(p, n, &vec![0; n], 0)?,
        CosetFunction::indicator(p, n, &unit_center, 1)?,
        CosetFunction::indicator(p, n, &vec![0; n], 1)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CensusOptions {
        CensusOptions {
            budget: 1_000_000_000,
            threads: 2,
        }
    }

    /// gamma for the line: t (1 - t/p) / (t - 1), from the two closed forms.
    fn tate_gamma_expected(p: u64) -> LaurentRat {
        let num = RatPoly::new(vec![Rat::one(), -Rat::new(1.into(), p.into())]);
        let den = RatPoly::new(vec![-Rat::one(), Rat::one()]);
        LaurentRat::new(1, num, den).unwrap()
    }

    #[test]
    fn zeta_of_unit_ball_matches_closed_form() {
        let xi = CosetFunction::indicator(3, 1, &[0], 0).unwrap();
        let z = zeta_of_cosetfn(SpaceId::Tate, &xi, Side::Primal, 1, 1, &opts()).unwrap();
        let l = z.as_exact().unwrap();
        assert_eq!(l.shift, 0);
        assert_eq!(l.fun, crate::zeta_padic::tate_closed_form(3));
    }

    #[test]
    fn zeta_of_units_is_constant() {
        let zp = CosetFunction::indicator(5, 1, &[0], 0).unwrap();
        let pzp = CosetFunction::indicator(5, 1, &[0], 1).unwrap();
        let units = zp.sub(&pzp).unwrap();
        let z = zeta_of_cosetfn(SpaceId::Tate, &units, Side::Primal, 1, 1, &opts()).unwrap();
        let l = z.as_exact().unwrap();
        assert_eq!(l.shift, 0);
        assert_eq!(
            l.fun,
            crate::arith::RationalFunction::constant(crate::rat(4, 5))
        );
    }

    #[test]
    fn zeta_of_zero_function() {
        let xi = CosetFunction::zero(3, 1);
        let z = zeta_of_cosetfn(SpaceId::Tate, &xi, Side::Primal, 1, 1, &opts()).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn zeta_is_complex_linear() {
        use crate::schwartz::Coeff;
        // (a f + b g) integrates to a Z(f) + b Z(g), complex coefficients
        let f = CosetFunction::indicator(3, 1, &[1], 1).unwrap();
        let g = CosetFunction::indicator(3, 1, &[0], 1).unwrap();
        let a = Coeff::from_complex(C64::new(0.3, -1.2));
        let b = Coeff::from_complex(C64::new(-2.0, 0.7));
        let combo = f.scale(&a).add(&g.scale(&b)).unwrap();
        let zc = zeta_of_cosetfn(SpaceId::Tate, &combo, Side::Primal, 1, 1, &opts()).unwrap();
        let zf = zeta_of_cosetfn(SpaceId::Tate, &f, Side::Primal, 1, 1, &opts()).unwrap();
        let zg = zeta_of_cosetfn(SpaceId::Tate, &g, Side::Primal, 1, 1, &opts()).unwrap();
        // compare by evaluation at a few rational points via the complex parts
        let zc = zc.to_complex();
        let zf = zf.to_complex();
        let zg = zg.to_complex();
        for tv in [0.25f64, 0.5, 2.0] {
            let ev = |m: &ComplexLaurent| -> C64 {
                let num: C64 = m
                    .num
                    .iter()
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, c| acc * tv + c);
                let den: f64 = m
                    .den
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * tv + rat_to_f64(c));
                num / den * tv.powi(m.shift as i32)
            };
            let want = a.value * ev(&zf) + b.value * ev(&zg);
            assert!((ev(&zc) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn tate_gamma_from_three_test_functions() {
        for p in [2u64, 3, 5] {
            let fns = default_test_functions(SpaceId::Tate, p).unwrap();
            let rep = gamma_extract(
                SpaceId::Tate,
                p,
                &fns,
                &AdditiveCharacter::standard(),
                false,
                1e-9,
                &opts(),
            )
            .unwrap();
            assert!(rep.residual < 1e-9, "residual {}", rep.residual);
            assert!(!rep.unconfirmed);
            assert_eq!(rep.gamma, tate_gamma_expected(p), "p = {p}");
        }
    }

    #[test]
    fn matrix2_gamma_consistent() {
        for p in [2u64, 3] {
            let fns = default_test_functions(SpaceId::Matrix2, p).unwrap();
            let rep = gamma_extract(
                SpaceId::Matrix2,
                p,
                &fns,
                &AdditiveCharacter::standard(),
                false,
                1e-9,
                &opts(),
            )
            .unwrap();
            assert!(rep.residual < 1e-9, "p={p} residual {}", rep.residual);
            // gamma equals the closed-form ratio of the two full-space zetas
            let z = crate::zeta_padic::matrix2_closed_form(p);
            let zl = LaurentRat::from_fun(z);
            let shift = pow_rat_signed(p, 2);
            let expected = zl.substitute_inverse(&shift).div(&zl).unwrap();
            assert_eq!(rep.gamma, expected);
        }
    }

    #[test]
    fn single_test_function_is_unconfirmed() {
        let fns = vec![CosetFunction::indicator(3, 1, &[0], 0).unwrap()];
        let rep = gamma_extract(
            SpaceId::Tate,
            3,
            &fns,
            &AdditiveCharacter::standard(),
            false,
            1e-9,
            &opts(),
        )
        .unwrap();
        assert!(rep.unconfirmed);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn half_density_shift_folding() {
        let fns = default_test_functions(SpaceId::Matrix2, 2).unwrap();
        let rep = gamma_extract(
            SpaceId::Matrix2,
            2,
            &fns,
            &AdditiveCharacter::standard(),
            true,
            1e-9,
            &opts(),
        )
        .unwrap();
        assert!(rep.half_density_folded);
        assert_eq!(rep.half_density_shift, Some(Rat::one()));
        // tate has lambda_0 = 1/2: reported but not folded
        let fns = default_test_functions(SpaceId::Tate, 3).unwrap();
        let rep = gamma_extract(
            SpaceId::Tate,
            3,
            &fns,
            &AdditiveCharacter::standard(),
            true,
            1e-9,
            &opts(),
        )
        .unwrap();
        assert!(!rep.half_density_folded);
        assert_eq!(rep.half_density_shift, Some(crate::rat(1, 2)));
    }

    #[test]
    fn cube_scalar_gamma_refused() {
        let fns = default_test_functions(SpaceId::CubeSplit, 2).unwrap();
        assert!(matches!(
            gamma_extract(
                SpaceId::CubeSplit,
                2,
                &fns,
                &AdditiveCharacter::standard(),
                false,
                1e-9,
                &opts(),
            ),
            Err(Error::WrongSpace(_))
        ));
    }
}

// ---------------------------------------------------------------------------
// gamma matrix probe for the cube space
// ---------------------------------------------------------------------------

/// A working stratum of the open orbit: valuation parity plus a set of unit
/// classes of P(x). The strata are a *working partition* by square-class
/// data; nothing here asserts they coincide with the open-orbit partition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpenSignature {
    pub parity: u8,
    pub classes: Vec<String>,
}

impl std::fmt::Display for OpenSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}:{}", self.parity, self.classes.join("|"))
    }
}

/// The stratum carrying the valuation-0 mass (for p = 2 the odd values of
/// P all lie in the classes 1 and 5 mod 8).
pub fn dominant_signature(p: u64) -> OpenSignature {
    if p == 2 {
        OpenSignature {
            parity: 0,
            classes: vec!["1".into(), "5".into()],
        }
    } else {
        OpenSignature {
            parity: 0,
            classes: vec!["1".into(), "u".into()],
        }
    }
}

/// Coarsest useful partition: valuation parity only.
pub fn parity_signatures(p: u64) -> Vec<OpenSignature> {
    let classes: Vec<String> = if p == 2 {
        vec!["1".into(), "3".into(), "5".into(), "7".into()]
    } else {
        vec!["1".into(), "u".into()]
    };
    (0..2u8)
        .map(|parity| OpenSignature {
            parity,
            classes: classes.clone(),
        })
        .collect()
}

/// Square-class flavored partition: parity times unit class mod 4 (p = 2) or
/// the Legendre class (p odd).
pub fn square_class_signatures(p: u64) -> Vec<OpenSignature> {
    let class_sets: Vec<Vec<String>> = if p == 2 {
        vec![vec!["1".into(), "5".into()], vec!["3".into(), "7".into()]]
    } else {
        vec![vec!["1".into()], vec!["u".into()]]
    };
    let mut out = Vec::new();
    for parity in 0..2u8 {
        for classes in &class_sets {
            out.push(OpenSignature {
                parity,
                classes: classes.clone(),
            });
        }
    }
    out
}

/// Stratified power data of one coset function: per signature, a list of
/// (valuation, complex mass) monomials, plus bound data for the truncation
/// error: the mass beyond the truncation depth and the class-pending
/// monomials (valuation known, class not).
struct StratSeries {
    per_signature: Vec<Vec<(i64, C64)>>,
    tail_mass: f64,
    pending: Vec<(i64, f64)>,
}

impl StratSeries {
    fn eval(&self, sig: usize, t: C64) -> C64 {
        self.per_signature[sig]
            .iter()
            .map(|&(v, mass)| mass * powc(t, v))
            .sum()
    }

    /// Rigorous bound on the error of eval() at |t| < 1: truncated tail plus
    /// the class-pending masses.
    fn error_bound(&self, t_abs: f64, m_trunc: u32) -> f64 {
        self.tail_mass * t_abs.powi(m_trunc as i32 + 1)
            + self
                .pending
                .iter()
                .map(|&(v, mass)| mass * t_abs.powi(v as i32))
                .sum::<f64>()
    }
}

fn powc(t: C64, e: i64) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let base = if e >= 0 { t } else { t.inv() };
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    acc
}

type StratCache = std::collections::BTreeMap<(Vec<i64>, u32, u32), crate::zeta_padic::StratifiedCensus>;

fn stratified_series(
    space: SpaceId,
    xi: &CosetFunction,
    signatures: &[OpenSignature],
    m_x: u32,
    cache: &mut StratCache,
    opts: &CensusOptions,
) -> Result<StratSeries> {
    let p = xi.p;
    let d = space.invariant_degree() as i64;
    let mut per_signature = vec![std::collections::BTreeMap::<i64, C64>::new(); signatures.len()];
    let mut tail_mass = 0.0f64;
    let mut pending: Vec<(i64, f64)> = Vec::new();
    for term in &xi.terms {
        let e = term
            .center
            .iter()
            .map(|c| denom_p_exponent(c, p))
            .max()
            .unwrap_or(0) as i64;
        let scale_e = e.max(-(term.level as i64)).max(0);
        let level_i = (term.level as i64 + scale_e) as u32;
        let pe = pow_rat_signed(p, scale_e);
        let center: Vec<i64> = term
            .center
            .iter()
            .map(|c| (c * &pe).numer().to_i64().expect("center fits i64"))
            .collect();
        let m_u = m_x + (scale_e * d) as u32;
        let key = (center.clone(), level_i, m_u);
        if !cache.contains_key(&key) {
            let census = crate::zeta_padic::census_stratified_on_coset(
                space, p, &center, level_i, m_u, opts,
            )?;
            cache.insert(key.clone(), census);
        }
        let census = &cache[&key];
        let measure_scale = (p as f64).powi((scale_e * xi.n as i64) as i32);
        for (m_u_val, row) in census.rows.iter().enumerate() {
            let val_x = m_u_val as i64 - scale_e * d;
            let parity = (((val_x % 2) + 2) % 2) as u8;
            for (cls_idx, mass) in row.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                let label = &census.classes[cls_idx];
                for (sig_idx, sig) in signatures.iter().enumerate() {
                    if sig.parity == parity && sig.classes.contains(label) {
                        let contrib =
                            term.coeff.value * rat_to_f64(mass) * measure_scale;
                        *per_signature[sig_idx]
                            .entry(val_x)
                            .or_insert(C64::new(0.0, 0.0)) += contrib;
                    }
                }
            }
        }
        tail_mass += term.coeff.value.norm() * rat_to_f64(&census.unresolved) * measure_scale;
        for (m_u_val, mass) in census.class_pending.iter().enumerate() {
            if !mass.is_zero() {
                let val_x = m_u_val as i64 - scale_e * d;
                pending.push((
                    val_x,
                    term.coeff.value.norm() * rat_to_f64(mass) * measure_scale,
                ));
            }
        }
    }
    Ok(StratSeries {
        per_signature: per_signature
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect(),
        tail_mass,
        pending,
    })
}

#[derive(Clone, Debug)]
pub struct GammaProbeReport {
    pub p: u64,
    pub signatures: Vec<String>,
    pub lambda_samples: Vec<f64>,
    /// Least-squares residual per retained sample (relative to the dual-side
    /// scale).
    pub residuals: Vec<f64>,
    pub skipped_samples: usize,
    /// Rigorous bound on the series-truncation error of the sampled values.
    pub truncation_bound: f64,
    pub test_functions: usize,
    pub m_trunc: u32,
}

/// Deterministic default test functions for the probe: the unit ball, the
/// shrunk ball, and level-1 cosets around seeded integer points.
pub fn default_probe_test_functions(p: u64, count: usize, seed: u64) -> Result<Vec<CosetFunction>> {
    let n = SpaceId::CubeSplit.dim();
    let mut out = vec![
        CosetFunction::indicator(p, n, &vec![0; n], 0)?,
        CosetFunction::indicator(p, n, &vec![0; n], 1)?,
    ];
    let mut rng = crate::rng::SplitMix64::new(seed);
    let mut seen = std::collections::BTreeSet::new();
    while out.len() < count {
        let center: Vec<i64> = (0..n).map(|_| rng.below(p) as i64).collect();
        if seen.insert(center.clone()) {
            out.push(CosetFunction::indicator(p, n, &center, 1)?);
        }
    }
    Ok(out)
}

/// Probe the gamma-matrix functional equation on the cube space: at each
/// sampled lambda, solve the least-squares system relating the vector of
/// dual-side stratified integrals of F_psi(xi_j) (at the shifted argument
/// p^{2 lambda_0}/t) to the primal stratified integrals of xi_j, and report
/// the residual. Truncated series are used with a rigorous tail bound, so a
/// small residual is meaningful only down to `truncation_bound`.
pub fn gamma_matrix_probe(
    p: u64,
    lambda_samples: &[f64],
    test_functions: &[CosetFunction],
    signatures: &[OpenSignature],
    m_trunc: u32,
    psi: &AdditiveCharacter,
    opts: &CensusOptions,
) -> Result<GammaProbeReport> {
    let space = SpaceId::CubeSplit;
    let k = signatures.len();
    let needed = k * k + 2;
    if test_functions.len() < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            got: test_functions.len(),
        });
    }
    let lambda0 = density_shift(space);
    let two_lambda0 = (&lambda0 * crate::rat_int(2)).to_integer().to_i64().unwrap();
    let mut cache = StratCache::new();
    let mut primal = Vec::new();
    let mut dual = Vec::new();
    for xi in test_functions {
        primal.push(stratified_series(space, xi, signatures, m_trunc, &mut cache, opts)?);
        let xhat = xi.fourier(space, psi)?;
        dual.push(stratified_series(space, &xhat, signatures, m_trunc, &mut cache, opts)?);
    }
    let j_count = test_functions.len();
    let mut residuals = Vec::new();
    let mut retained = Vec::new();
    let mut skipped = 0usize;
    let mut truncation_bound = 0.0f64;
    for &lam in lambda_samples {
        let t = (p as f64).powf(-lam);
        let td = (p as f64).powf(two_lambda0 as f64 - lam);
        if t >= 1.0 || td >= 1.0 {
            skipped += 1;
            continue;
        }
        let tc = C64::new(t, 0.0);
        let tdc = C64::new(td, 0.0);
        // A[j][tau], B[j][sigma]
        let a: Vec<Vec<C64>> = (0..j_count)
            .map(|j| (0..k).map(|tau| primal[j].eval(tau, tc)).collect())
            .collect();
        let b: Vec<Vec<C64>> = (0..j_count)
            .map(|j| (0..k).map(|sig| dual[j].eval(sig, tdc)).collect())
            .collect();
        let tail: f64 = (0..j_count)
            .map(|j| primal[j].error_bound(t, m_trunc) + dual[j].error_bound(td, m_trunc))
            .fold(0.0, f64::max);
        truncation_bound = truncation_bound.max(tail);
        if a.iter().flatten().chain(b.iter().flatten()).any(|v| !v.is_finite()) {
            skipped += 1;
            continue;
        }
        // equilibrate the columns so strata of very different mass do not
        // trip the pivot threshold artificially
        let mut col_scale = vec![0.0f64; k];
        for (tau, cs) in col_scale.iter_mut().enumerate() {
            *cs = (0..j_count)
                .map(|j| a[j][tau].norm())
                .fold(0.0f64, f64::max);
            if *cs == 0.0 {
                // an empty stratum at this depth: genuinely rank deficient
                return Err(Error::RankDeficient);
            }
        }
        let a: Vec<Vec<C64>> = (0..j_count)
            .map(|j| (0..k).map(|tau| a[j][tau] / col_scale[tau]).collect())
            .collect();
        // normal equations per sigma: (A^H A) g = A^H b_sigma
        let mut ata = vec![vec![C64::new(0.0, 0.0); k]; k];
        for t1 in 0..k {
            for t2 in 0..k {
                for j in 0..j_count {
                    ata[t1][t2] += a[j][t1].conj() * a[j][t2];
                }
            }
        }
        let scale_b = b
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0f64;
        for sig in 0..k {
            let mut rhs = vec![C64::new(0.0, 0.0); k];
            for (t1, r) in rhs.iter_mut().enumerate() {
                for j in 0..j_count {
                    *r += a[j][t1].conj() * b[j][sig];
                }
            }
            let gamma_row = solve_complex(&ata, &rhs)?;
            for j in 0..j_count {
                let pred: C64 = (0..k).map(|tau| gamma_row[tau] * a[j][tau]).sum();
                worst = worst.max((pred - b[j][sig]).norm());
            }
        }
        residuals.push(worst / scale_b);
        retained.push(lam);
    }
    if residuals.is_empty() {
        return Err(Error::RankDeficient);
    }
    Ok(GammaProbeReport {
        p,
        signatures: signatures.iter().map(|s| s.to_string()).collect(),
        lambda_samples: retained,
        residuals,
        skipped_samples: skipped,
        truncation_bound,
        test_functions: test_functions.len(),
        m_trunc,
    })
}

/// Gaussian elimination with partial pivoting over complex doubles.
fn solve_complex(a: &[Vec<C64>], b: &[C64]) -> Result<Vec<C64>> {
    let n = b.len();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    let scale = m
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for c in 0..n {
        let (pivot, pnorm) = (c..n)
            .map(|r| (r, m[r][c].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pnorm < 1e-12 * scale {
            return Err(Error::RankDeficient);
        }
        m.swap(c, pivot);
        let inv = m[c][c].inv();
        for j in c..=n {
            m[c][j] *= inv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f.norm() > 0.0 {
                    for j in c..=n {
                        let sub = m[c][j] * f;
                        m[r][j] -= sub;
                    }
                }
            }
        }
    }
    Ok((0..n).map(|i| m[i][n]).collect())
}
