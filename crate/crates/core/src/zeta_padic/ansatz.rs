//! Structured-denominator reconstruction.
//!
//! Igusa-type zeta functions have denominators of the shape
//! prod_j (1 - p^{-a_j} t^{b_j}) with small positive exponents. Fixing the
//! denominator shape reduces the number of exact census coefficients needed:
//! the numerator follows linearly from the leading window and every remaining
//! coefficient is validation data.

use crate::arith::{RatPoly, RationalFunction};
use crate::error::{Error, Result};
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct AnsatzSearch {
    /// Maximum number of denominator factors.
    pub max_factors: usize,
    /// Maximum a_j in p^{-a_j}.
    pub max_val_exp: u32,
    /// Maximum b_j in t^{b_j}.
    pub max_t_exp: u32,
}

impl Default for AnsatzSearch {
    fn default() -> Self {
        AnsatzSearch {
            max_factors: 4,
            max_val_exp: 8,
            max_t_exp: 4,
        }
    }
}

/// Enumerate factor multisets in a deterministic order (fewer factors first,
/// then lexicographic), fit the numerator on the leading window, and return
/// the first candidate that reproduces every coefficient with at least
/// `holdout` coefficients beyond the window.
pub(crate) fn ansatz_fit(
    coeffs: &[Rat],
    p: u64,
    num_deg: usize,
    holdout: usize,
    search: &AnsatzSearch,
) -> Result<(RationalFunction, String)> {
    let window = num_deg + 1;
    if coeffs.len() < window + holdout {
        return Err(Error::InsufficientCoefficients {
            needed: window + holdout,
            got: coeffs.len(),
        });
    }
    let factors: Vec<(u32, u32)> = (1..=search.max_val_exp)
        .flat_map(|a| (1..=search.max_t_exp).map(move |b| (a, b)))
        .collect();
    let mut stack: Vec<Vec<(u32, u32)>> = vec![vec![]];
    for size in 0..=search.max_factors {
        let level: Vec<Vec<(u32, u32)>> = stack
            .iter()
            .filter(|m| m.len() == size)
            .cloned()
            .collect();
        for multiset in level {
            if let Some(fit) = try_shape(coeffs, p, num_deg, &multiset) {
                let shape = shape_string(p, &multiset);
                return Ok((fit, shape));
            }
            if size < search.max_factors {
                let start = multiset.last().cloned().unwrap_or((0, 0));
                for &f in factors.iter().filter(|&&f| f >= start) {
                    let mut next = multiset.clone();
                    next.push(f);
                    stack.push(next);
                }
            }
        }
    }
    Err(Error::NoFit)
}

fn shape_string(p: u64, multiset: &[(u32, u32)]) -> String {
    if multiset.is_empty() {
        return "1".to_string();
    }
    multiset
        .iter()
        .map(|(a, b)| {
            let t = if *b == 1 {
                "t".to_string()
            } else {
                format!("t^{b}")
            };
            format!("(1 - {t}/{p}^{a})")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn try_shape(
    coeffs: &[Rat],
    p: u64,
    num_deg: usize,
    multiset: &[(u32, u32)],
) -> Option<RationalFunction> {
    let mut den = RatPoly::one();
    for (a, b) in multiset {
        let pa = Rat::new(BigInt::one(), BigInt::from(p).pow(*a));
        let mut c = vec![Rat::new(0.into(), 1.into()); *b as usize + 1];
        c[0] = Rat::one();
        c[*b as usize] = -pa;
        den = den.mul(&RatPoly::new(c));
    }
    // numerator from the leading window: N_k = (c * D)_k for k <= num_deg,
    // then every later coefficient must satisfy the recurrence (c * D)_k = 0
    // (D has constant term 1, so this is the full series check without the
    // cost of canonicalizing a rational function per candidate)
    let mut num = Vec::with_capacity(num_deg + 1);
    for k in 0..=num_deg {
        let mut acc = Rat::new(0.into(), 1.into());
        for i in 0..=k.min(den.coeffs().len().saturating_sub(1)) {
            acc += den.coeff(i) * &coeffs[k - i];
        }
        num.push(acc);
    }
    for k in num_deg + 1..coeffs.len() {
        let mut acc = Rat::new(0.into(), 1.into());
        for i in 0..=k.min(den.coeffs().len().saturating_sub(1)) {
            acc += den.coeff(i) * &coeffs[k - i];
        }
        if !Zero::is_zero(&acc) {
            return None;
        }
    }
    RationalFunction::new(RatPoly::new(num), den).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn recovers_tate_shape() {
        // (1 - 1/3)/(1 - t/3)
        let f = RationalFunction::new(
            RatPoly::constant(rat(2, 3)),
            RatPoly::new(vec![rat_int(1), rat(-1, 3)]),
        )
        .unwrap();
        let coeffs = f.series_expand(6);
        let (fit, shape) = ansatz_fit(&coeffs, 3, 0, 2, &AnsatzSearch::default()).unwrap();
        assert_eq!(fit, f);
        assert_eq!(shape, "(1 - t/3^1)");
    }

    #[test]
    fn recovers_two_factor_shape() {
        let den = RatPoly::new(vec![rat_int(1), rat(-1, 2)])
            .mul(&RatPoly::new(vec![rat_int(1), rat_int(0), rat(-1, 8)]));
        let f = RationalFunction::new(RatPoly::new(vec![rat_int(1), rat(1, 4)]), den).unwrap();
        let coeffs = f.series_expand(12);
        let (fit, shape) = ansatz_fit(&coeffs, 2, 1, 2, &AnsatzSearch::default()).unwrap();
        assert_eq!(fit, f);
        assert_eq!(shape, "(1 - t/2^1) (1 - t^2/2^3)");
    }

    #[test]
    fn no_fit_for_non_igusa_data() {
        // Fibonacci-style growth cannot come from this denominator family at
        // these bounds
        let coeffs: Vec<Rat> = [1i64, 1, 2, 3, 5, 8, 13]
            .iter()
            .map(|&c| rat_int(c))
            .collect();
        assert!(matches!(
            ansatz_fit(&coeffs, 2, 1, 2, &AnsatzSearch::default()),
            Err(Error::NoFit)
        ));
    }
}
