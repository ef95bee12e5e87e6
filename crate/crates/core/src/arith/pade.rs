//! Exact Pade reconstruction of a rational function from Taylor data.

use super::poly::RatPoly;
use super::ratfun::RationalFunction;
use crate::error::{Error, Result};
use crate::Rat;
use num_traits::{One, Zero};

/// Reconstruct a rational function whose Taylor series at t = 0 matches all
/// of `coeffs`, with numerator degree <= `max_num_deg` and denominator degree
/// <= `max_den_deg`.
///
/// The caller must supply at least `max_num_deg + max_den_deg + 1 + holdout`
/// coefficients; everything beyond the fitting window acts as validation
/// data, and a result is only returned if the whole prefix matches.
///
/// Among consistent candidates the minimal total degree wins, ties broken by
/// the lower denominator degree, so the output is canonical (in particular
/// gcd(N, D) = 1 automatically). Returns [`Error::NoFit`] when the data is
/// not rational at the given degrees.
pub fn pade_reconstruct(
    coeffs: &[Rat],
    max_num_deg: usize,
    max_den_deg: usize,
    holdout: usize,
) -> Result<RationalFunction> {
    let needed = max_num_deg + max_den_deg + 1 + holdout;
    if coeffs.len() < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            got: coeffs.len(),
        });
    }
    for total in 0..=(max_num_deg + max_den_deg) {
        for den_deg in 0..=total.min(max_den_deg) {
            let num_deg = total - den_deg;
            if num_deg > max_num_deg {
                continue;
            }
            if let Some(r) = try_fit(coeffs, num_deg, den_deg) {
                return Ok(r);
            }
        }
    }
    Err(Error::NoFit)
}

/// Fit N/D with exact degrees (num_deg, den_deg), D(0) = 1, against all
/// supplied coefficients. None if the linear system is inconsistent.
fn try_fit(coeffs: &[Rat], num_deg: usize, den_deg: usize) -> Option<RationalFunction> {
    // Unknowns: d_1..d_{den_deg}. For every k > num_deg the convolution
    // (c * D)_k must vanish:  c_k + sum_{i=1..den_deg} d_i c_{k-i} = 0.
    let rows: Vec<usize> = (num_deg + 1..coeffs.len()).collect();
    let mut system: Vec<Vec<Rat>> = Vec::with_capacity(rows.len());
    for &k in &rows {
        let mut row = Vec::with_capacity(den_deg + 1);
        for i in 1..=den_deg {
            row.push(if i <= k {
                coeffs[k - i].clone()
            } else {
                Rat::zero()
            });
        }
        row.push(-coeffs[k].clone()); // rhs
        system.push(row);
    }
    let d = solve_exact(system, den_deg)?;
    // Build D and N, then verify every supplied coefficient.
    let mut den = vec![Rat::one()];
    den.extend(d);
    let den = RatPoly::new(den);
    let mut num = Vec::with_capacity(num_deg + 1);
    for k in 0..=num_deg {
        let mut acc = Rat::zero();
        for i in 0..=k.min(den.coeffs().len() - 1) {
            acc += den.coeff(i) * &coeffs[k - i];
        }
        num.push(acc);
    }
    let num = RatPoly::new(num);
    let r = RationalFunction::new(num, den).ok()?;
    let check = r.series_expand(coeffs.len() - 1);
    if check == coeffs {
        Some(r)
    } else {
        None
    }
}

/// Exact Gaussian elimination on an augmented system (rows of n+1 entries);
/// returns a solution with free variables set to 0, or None if inconsistent.
fn solve_exact(mut rows: Vec<Vec<Rat>>, n: usize) -> Option<Vec<Rat>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut r = 0usize;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone().recip();
        for v in rows[r][c..].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..=n {
                    let sub = &rows[r][j] * &f;
                    rows[i][j] -= sub;
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    // inconsistency: a row 0 = nonzero
    for row in &rows {
        if row[..n].iter().all(|v| v.is_zero()) && !row[n].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rat::zero(); n];
    for c in 0..n {
        if let Some(p) = pivot_of_col[c] {
            sol[c] = rows[p][n].clone();
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn geometric_series_tate() {
        let coeffs = vec![rat(2, 3), rat(2, 9), rat(2, 27), rat(2, 81), rat(2, 243)];
        let r = pade_reconstruct(&coeffs, 0, 1, 2).unwrap();
        let want = RationalFunction::new(
            RatPoly::constant(rat(2, 3)),
            RatPoly::new(vec![rat_int(1), rat(-1, 3)]),
        )
        .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn constant_series() {
        let coeffs = vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)];
        let r = pade_reconstruct(&coeffs, 0, 0, 2).unwrap();
        assert_eq!(r, RationalFunction::constant(rat_int(1)));
    }

    #[test]
    fn fibonacci_needs_denominator_degree_two() {
        let coeffs: Vec<Rat> = [1, 1, 2, 3, 5].iter().map(|&c| rat_int(c)).collect();
        assert!(matches!(
            pade_reconstruct(&coeffs, 0, 1, 1),
            Err(Error::NoFit)
        ));
        // ...and succeeds once the denominator may have degree 2
        let r = pade_reconstruct(&coeffs, 1, 2, 1).unwrap();
        let want = RationalFunction::new(
            RatPoly::constant(rat_int(1)),
            RatPoly::new(vec![rat_int(1), rat_int(-1), rat_int(-1)]),
        )
        .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn precondition_enforced() {
        let coeffs = vec![rat_int(1), rat_int(2)];
        assert!(matches!(
            pade_reconstruct(&coeffs, 1, 1, 1),
            Err(Error::InsufficientCoefficients { needed: 4, got: 2 })
        ));
    }

    #[test]
    fn minimal_degree_tie_break() {
        // the true constant function fits at (0,0) even with slack degrees allowed
        let mut coeffs = vec![rat_int(5)];
        coeffs.extend(std::iter::repeat(rat_int(0)).take(5));
        let r = pade_reconstruct(&coeffs, 2, 2, 1).unwrap();
        assert_eq!(r, RationalFunction::constant(rat_int(5)));
        // the constant *series* 5 + 5t + ... is 5/(1-t), found at minimal (0,1)
        let coeffs = vec![rat_int(5); 6];
        let r = pade_reconstruct(&coeffs, 2, 2, 1).unwrap();
        let want = RationalFunction::new(
            RatPoly::constant(rat_int(5)),
            RatPoly::new(vec![rat_int(1), rat_int(-1)]),
        )
        .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn round_trip_random_rationals() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(33);
        for _ in 0..50 {
            let nd = rng.below(3) as usize;
            let dd = rng.below(3) as usize;
            let num = RatPoly::new((0..=nd).map(|_| rat_int(rng.range_i64(-4, 4))).collect());
            let mut denc = vec![rat_int(1)];
            denc.extend((0..dd).map(|_| rat(rng.range_i64(-3, 3), 2)));
            let den = RatPoly::new(denc);
            let Ok(r) = RationalFunction::new(num, den) else {
                continue;
            };
            let n = nd + dd + 3;
            let coeffs = r.series_expand(n);
            let back = pade_reconstruct(&coeffs, nd, dd, 2).unwrap();
            assert_eq!(back.series_expand(n), coeffs);
            assert_eq!(back, r);
        }
    }
}
