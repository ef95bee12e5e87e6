//! Property tests over arbitrary inputs for the exact arithmetic layer.

use num_traits::One;
use proptest::prelude::*;
use pvzeta_core::arith::{pade_reconstruct, RatPoly, RationalFunction, ResidueRing};
use pvzeta_core::ring::Scalar;
use pvzeta_core::{rat_int, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

proptest! {
    /// Reduction Z -> Z/p^k is a ring homomorphism.
    #[test]
    fn residue_reduction_homomorphism(
        a in -100_000i64..100_000,
        b in -100_000i64..100_000,
        pk in prop::sample::select(vec![(2u64, 6u32), (3, 4), (5, 3), (13, 2), (97, 1)]),
    ) {
        let ring = ResidueRing::new(pk.0, pk.1).unwrap();
        prop_assert_eq!(ring.elem(a).add(&ring.elem(b)), ring.elem(a + b));
        prop_assert_eq!(ring.elem(a).mul(&ring.elem(b)), ring.elem(a * b));
        prop_assert_eq!(ring.elem(a).sub(&ring.elem(b)), ring.elem(a - b));
    }

    /// Units have inverses, non-units do not.
    #[test]
    fn residue_inverse_iff_unit(v in 0i64..3125) {
        let ring = ResidueRing::new(5, 5).unwrap();
        let r = ring.elem(v);
        match r.try_inv() {
            Some(inv) => prop_assert_eq!(r.mul(&inv), ring.one()),
            None => prop_assert!(v % 5 == 0),
        }
    }

    /// series_expand . pade_reconstruct . series_expand is the identity on
    /// rational functions within the degree bounds.
    #[test]
    fn pade_round_trip(
        num in prop::collection::vec(small_rat(), 1..4),
        den_tail in prop::collection::vec(small_rat(), 0..3),
    ) {
        let num_poly = RatPoly::new(num);
        let mut den = vec![Rat::one()];
        den.extend(den_tail);
        let den_poly = RatPoly::new(den);
        let nd = num_poly.degree().unwrap_or(0);
        let dd = den_poly.degree().unwrap_or(0);
        if let Ok(r) = RationalFunction::new(num_poly, den_poly) {
            let len = nd + dd + 4;
            let coeffs = r.series_expand(len);
            let back = pade_reconstruct(&coeffs, nd, dd, 2).unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.series_expand(len), coeffs);
        }
    }

    /// Valuation marks the exact power of p dividing a residue.
    #[test]
    fn valuation_divides(v in 1i64..2187) {
        let ring = ResidueRing::new(3, 7).unwrap();
        let r = ring.elem(v);
        if let pvzeta_core::arith::Valuation::Finite(m) = r.valuation() {
            let pm = 3i64.pow(m);
            prop_assert!(v % pm == 0);
            prop_assert!((v / pm) % 3 != 0);
        } else {
            prop_assert!(v % 2187 == 0);
        }
    }
}

#[test]
fn pade_rejects_truncated_data() {
    // only 3 coefficients of a denominator-degree-2 function: precondition
    // fails before any fitting happens
    let coeffs: Vec<Rat> = [1, 2, 3].iter().map(|&c| rat_int(c)).collect();
    assert!(pade_reconstruct(&coeffs, 1, 2, 2).is_err());
}
