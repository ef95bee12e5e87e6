//! Archimedean zeta integrals in the convergent range.
//!
//! Evaluates Z(s) = integral of |f(x)|^{s - n/d} xi_sigma(x) dx over R^n
//! against the Gaussian xi_sigma(x) = exp(-pi sigma |x|^2), optionally
//! restricted to a sign stratum of f. The n/d normalization makes the tate
//! case the classical integral of |x|^{s-1} e^{-pi sigma x^2}, with closed
//! form pi^{-s/2} Gamma(s/2) sigma^{-s/2} as an oracle.
//!
//! One-dimensional integrals are done adaptively with the singularity at the
//! origin removed by substitution; higher dimensions use tensored
//! Gauss-Hermite with degree escalation. Meromorphic continuation is out of
//! scope: inputs outside the configured convergent range are refused.

use crate::error::{Error, Result};
use crate::pvs::SpaceId;
use crate::rng::SplitMix64;
use crate::C64;

/// Fast float evaluation of the basic invariant (mirrors the exact integer
/// kernel; cross-checked against the generic evaluator in tests).
pub fn eval_invariant_f64(space: SpaceId, x: &[f64]) -> f64 {
    match space {
        SpaceId::Tate => x[0],
        SpaceId::Matrix2 => x[0] * x[3] - x[1] * x[2],
        SpaceId::CubeSplit => {
            let a = x[0] * x[3] - x[1] * x[2];
            let c = x[4] * x[7] - x[5] * x[6];
            let b = x[0] * x[7] - x[1] * x[6] - x[2] * x[5] + x[3] * x[4];
            b * b - 4.0 * a * c
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scheme {
    AdaptiveGlobal,
    TensorGauss,
}

#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: Scheme::AdaptiveGlobal,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_evals: 200_000_000,
        }
    }
}

/// Restriction to a sign stratum of the invariant.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitFilter {
    Positive,
    Negative,
}

#[derive(Clone, Debug)]
pub struct RealZetaSample {
    pub s: C64,
    pub value: C64,
    pub est_error: f64,
    pub orbit_filter: Option<OrbitFilter>,
    pub evals: u64,
}

/// Conservative lower bounds of the convergent range in s (the integrand is
/// |f|^{s - n/d}): the 1- and 4-dimensional abscissas are the true ones, the
/// cube bound is empirical and deliberately safe.
pub fn min_s(space: SpaceId) -> f64 {
    match space {
        SpaceId::Tate => 0.0,
        SpaceId::Matrix2 => 1.0,
        SpaceId::CubeSplit => 2.0,
    }
}

fn delta(space: SpaceId) -> f64 {
    space.dim() as f64 / space.invariant_degree() as f64
}

/// Numeric zeta sample. `range_override` lowers the convergence guard for
/// experiments outside the conservative default.
pub fn zeta_real(
    space: SpaceId,
    s: f64,
    sigma: f64,
    spec: &QuadratureSpec,
    orbit_filter: Option<OrbitFilter>,
    range_override: Option<f64>,
) -> Result<RealZetaSample> {
    assert!(sigma > 0.0, "gaussian scale must be positive");
    let bound = range_override.unwrap_or_else(|| min_s(space));
    if s <= bound {
        return Err(Error::ConvergenceRangeViolated { s, min: bound });
    }
    let z = s - delta(space);
    match space {
        SpaceId::Tate => tate_integral(s, sigma, spec, orbit_filter),
        SpaceId::Matrix2 => tensor_integral(space, z, s, sigma, spec, orbit_filter, &[16, 24, 32, 40]),
        SpaceId::CubeSplit => tensor_integral(space, z, s, sigma, spec, orbit_filter, &[6, 8, 10]),
    }
}

/// The closed-form oracle pi^{-s/2} Gamma(s/2) sigma^{-s/2} for the line.
pub fn tate_gaussian_closed_form(s: f64, sigma: f64) -> f64 {
    (std::f64::consts::PI * sigma).powf(-s / 2.0) * gamma_fn(s / 2.0)
}

/// Closed form for the 2x2 matrix Gaussian integral of |det|^z:
/// (2 pi)^{-z} Gamma(z + 1) at sigma = 1, with the sigma power from
/// homogeneity. Derived by rotating the coordinate pairs and reducing to a
/// 2-dimensional radial integral; used as an independent oracle in tests.
pub fn matrix2_gaussian_closed_form(s: f64, sigma: f64) -> f64 {
    let z = s - 2.0;
    let base = (2.0 * std::f64::consts::PI).powf(-z) * gamma_fn(z + 1.0);
    base * sigma.powf(-(4.0 + 2.0 * z) / 2.0)
}

/// sigma-homogeneity exponent: zeta(sigma) = sigma^{-(n + z d)/2} zeta(1).
pub fn sigma_exponent(space: SpaceId, s: f64) -> f64 {
    let z = s - delta(space);
    (space.dim() as f64 + z * space.invariant_degree() as f64) / 2.0
}

fn tate_integral(
    s: f64,
    sigma: f64,
    spec: &QuadratureSpec,
    filter: Option<OrbitFilter>,
) -> Result<RealZetaSample> {
    // integral over (0, inf) of x^{s-1} e^{-pi sigma x^2}; both sign halves
    // are equal by symmetry
    let mut evals = 0u64;
    // near part: x = u^{1/s} straightens the x^{s-1} singularity exactly:
    // int_0^1 x^{s-1} g(x) dx = (1/s) int_0^1 g(u^{1/s}) du
    let near = adaptive_simpson(
        &mut |u: f64| {
            if u <= 0.0 {
                1.0
            } else {
                (-std::f64::consts::PI * sigma * u.powf(2.0 / s)).exp()
            }
        },
        0.0,
        1.0,
        spec.abs_tol,
        spec.max_evals,
        &mut evals,
    )?;
    let cutoff = (45.0 / (std::f64::consts::PI * sigma)).sqrt().max(2.0);
    let far = adaptive_simpson(
        &mut |x: f64| x.powf(s - 1.0) * (-std::f64::consts::PI * sigma * x * x).exp(),
        1.0,
        cutoff,
        spec.abs_tol,
        spec.max_evals,
        &mut evals,
    )?;
    let half = near.0 / s + far.0;
    let err = near.1 / s + far.1;
    let (value, est_error) = match filter {
        None => (2.0 * half, 2.0 * err),
        Some(_) => (half, err),
    };
    Ok(RealZetaSample {
        s: C64::new(s, 0.0),
        value: C64::new(value, 0.0),
        est_error,
        orbit_filter: filter,
        evals,
    })
}

/// Tensor Gauss-Hermite over R^n with degree escalation; the estimated error
/// is the difference between the last two degrees.
fn tensor_integral(
    space: SpaceId,
    z: f64,
    s: f64,
    sigma: f64,
    spec: &QuadratureSpec,
    filter: Option<OrbitFilter>,
    degrees: &[usize],
) -> Result<RealZetaSample> {
    let n = space.dim();
    let mut prev: Option<f64> = None;
    let mut value = 0.0;
    let mut est = f64::INFINITY;
    let mut evals = 0u64;
    for &deg in degrees {
        let needed = (deg as u64).pow(n as u32);
        if evals + needed > spec.max_evals {
            return Err(Error::MaxEvalsExceeded(spec.max_evals));
        }
        value = gauss_hermite_nd(space, z, sigma, deg, filter, &mut evals);
        if let Some(p) = prev {
            est = (value - p).abs();
            if est <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
                break;
            }
        }
        prev = Some(value);
    }
    Ok(RealZetaSample {
        s: C64::new(s, 0.0),
        value: C64::new(value, 0.0),
        est_error: est,
        orbit_filter: filter,
        evals,
    })
}

fn gauss_hermite_nd(
    space: SpaceId,
    z: f64,
    sigma: f64,
    deg: usize,
    filter: Option<OrbitFilter>,
    evals: &mut u64,
) -> f64 {
    let n = space.dim();
    let (nodes, weights) = hermite_nodes(deg);
    // x = u / sqrt(pi sigma) folds the Gaussian into the Hermite weight
    let scale = 1.0 / (std::f64::consts::PI * sigma).sqrt();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0f64; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..n {
            w *= weights[idx[i]];
            x[i] = nodes[idx[i]] * scale;
        }
        let f = eval_invariant_f64(space, &x);
        *evals += 1;
        if f == 0.0 {
            // the cone is a null set: its nodes contribute only at z = 0,
            // and only to the unfiltered integral
            if z == 0.0 && filter.is_none() {
                total += w;
            }
        } else {
            let keep = match filter {
                None => true,
                Some(OrbitFilter::Positive) => f > 0.0,
                Some(OrbitFilter::Negative) => f < 0.0,
            };
            if keep {
                total += w * f.abs().powf(z);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return total * scale.powi(n as i32);
            }
            idx[i] += 1;
            if idx[i] < deg {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Adaptive Simpson on [a, b]; returns (value, error estimate).
fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_evals: u64,
    evals: &mut u64,
) -> Result<(f64, f64)> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        max_evals: u64,
        evals: &mut u64,
    ) -> Result<(f64, f64)> {
        if *evals > max_evals {
            return Err(Error::MaxEvalsExceeded(max_evals));
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        *evals += 2;
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok((left + right + delta / 15.0, delta.abs() / 15.0));
        }
        let (lv, le) = rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, max_evals, evals)?;
        let (rv, re) = rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, max_evals, evals)?;
        Ok((lv + rv, le + re))
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    *evals += 3;
    let whole = simpson(fa, fm, fb, a, b);
    rec(f, a, b, fa, fm, fb, whole, tol, 48, max_evals, evals)
}

/// Gauss-Hermite nodes and weights for weight exp(-x^2) (Numerical-Recipes
/// style: Newton refinement on the orthonormal Hermite recurrence).
pub fn hermite_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^{-1/4}
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let m = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => {
                let u = 2.0 * n as f64 + 1.0;
                u.sqrt() - 1.85575 * u.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Lanczos approximation of Gamma for positive real arguments.
pub fn gamma_fn(x: f64) -> f64 {
    assert!(x > 0.0);
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Monte Carlo cross-check of the Gaussian zeta (used to sanity-check the
/// 8-dimensional quadrature at loose tolerance).
pub fn zeta_real_mc(
    space: SpaceId,
    s: f64,
    sigma: f64,
    samples: u64,
    seed: u64,
) -> (f64, f64) {
    let n = space.dim();
    let z = s - delta(space);
    // x ~ N(0, 1/(2 pi sigma)) per coordinate; the Gaussian mass is sigma^{-n/2}
    let mass = sigma.powf(-(n as f64) / 2.0);
    let sd = 1.0 / (2.0 * std::f64::consts::PI * sigma).sqrt();
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut x = vec![0.0f64; n];
    for i in 0..samples {
        let mut rng = SplitMix64::substream(seed, i);
        let mut j = 0;
        while j < n {
            // Box-Muller
            let u1 = rng.unit_f64().max(1e-300);
            let u2 = rng.unit_f64();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s1, c1) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            x[j] = r * c1 * sd;
            j += 1;
            if j < n {
                x[j] = r * s1 * sd;
                j += 1;
            }
        }
        let f = eval_invariant_f64(space, &x).abs().powf(z);
        sum += f;
        sum2 += f * f;
    }
    let mean = sum / samples as f64;
    let var = (sum2 / samples as f64 - mean * mean).max(0.0);
    let stderr = (var / samples as f64).sqrt();
    (mean * mass, stderr * mass)
}

/// Split a point of the open orbit into (unit part, dilation): the dilation
/// a satisfies |f(x)| = |omega(a)| and the unit part has |f| = 1, with
/// x = unit * a as a right action of the dilation through the third slot
/// (cube) or the scalar (tate).
pub fn rho_split(space: SpaceId, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    if space == SpaceId::Matrix2 {
        return Err(Error::WrongSpace("matrix2"));
    }
    if x.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: x.len(),
        });
    }
    let f = eval_invariant_f64(space, x);
    if f == 0.0 {
        return Err(Error::BoundaryPoint);
    }
    let d = space.invariant_degree() as f64;
    let t = f.abs().powf(1.0 / d);
    let unit: Vec<f64> = x.iter().map(|c| c / t).collect();
    Ok((unit, t))
}
