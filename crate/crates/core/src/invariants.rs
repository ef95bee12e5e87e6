//! Relative invariants: evaluation, the eigencharacter identity, and the
//! logarithmic derivative map into the dual space.

use crate::error::{Error, Result};

use crate::pvs::{act, eigencharacter, sample_group_element_q, sample_point_q, GroupElement,
    Point, SpaceId};
use crate::ring::Scalar;
use crate::rng::SplitMix64;
use crate::Rat;
use num_traits::Zero;

/// Sparse multivariate polynomial with integer coefficients; exponent vector
/// per term. Used as the data-driven form of the basic invariants (and as an
/// independent evaluation route in tests; the closed forms are the fast
/// path).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    /// (coefficient, exponents) with exponents.len() == nvars
    pub terms: Vec<(i64, Vec<u8>)>,
}

impl MultiPoly {
    fn normalize(mut self) -> Self {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(i64, Vec<u8>)> = Vec::new();
        for (c, e) in self.terms {
            match out.last_mut() {
                Some((c0, e0)) if *e0 == e => *c0 += c,
                _ => out.push((c, e)),
            }
        }
        out.retain(|(c, _)| *c != 0);
        MultiPoly {
            nvars: self.nvars,
            terms: out,
        }
    }

    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u8; nvars];
        e[i] = 1;
        MultiPoly {
            nvars,
            terms: vec![(1, e)],
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (c1, e1) in &self.terms {
            for (c2, e2) in &o.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((c1 * c2, e));
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
        .normalize()
    }

    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
        .normalize()
    }

    fn scale(&self, c: i64) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, e)| (a * c, e.clone())).collect(),
        }
        .normalize()
    }

    pub fn eval<R: Scalar>(&self, coords: &[R]) -> R {
        assert_eq!(coords.len(), self.nvars);
        let witness = &coords[0];
        let mut acc = witness.zero_like();
        for (c, exps) in &self.terms {
            let mut term = witness.from_i64_like(*c);
            for (x, &e) in coords.iter().zip(exps) {
                for _ in 0..e {
                    term = term.mul(x);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Partial derivative in variable i.
    pub fn derivative(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[i] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (c * e[i] as i64, e2)
            })
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
        .normalize()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }
}

/// The basic relative invariant as an explicit integer polynomial:
/// x for tate, the determinant for matrix2, and the quadratic-form
/// discriminant P = b^2 - 4ac for the split cube. Integer-normalized
/// representatives are pinned; any rescaling by a scalar would rescale
/// gamma-factors accordingly.
pub fn invariant_polynomial(space: SpaceId) -> MultiPoly {
    let n = space.dim();
    let v = |i| MultiPoly::var(n, i);
    match space {
        SpaceId::Tate => v(0),
        SpaceId::Matrix2 => v(0).mul(&v(3)).add(&v(1).mul(&v(2)).scale(-1)),
        SpaceId::CubeSplit => {
            let a = v(0).mul(&v(3)).add(&v(1).mul(&v(2)).scale(-1));
            let c = v(4).mul(&v(7)).add(&v(5).mul(&v(6)).scale(-1));
            // b = tr(adj(x1) x2) = x0 y3 - x1 y2 - x2 y1 + x3 y0
            let b = v(0)
                .mul(&v(7))
                .add(&v(1).mul(&v(6)).scale(-1))
                .add(&v(2).mul(&v(5)).scale(-1))
                .add(&v(3).mul(&v(4)));
            b.mul(&b).add(&a.mul(&c).scale(-4))
        }
    }
}

/// Coefficients of the binary quadratic form F_x(v1, v2) attached to a cube
/// point: a = det x1, c = det x2, b = det(x1 + x2) - det x1 - det x2.
#[derive(Clone, PartialEq, Debug)]
pub struct QuadraticCoeffs<R: Scalar> {
    pub a: R,
    pub b: R,
    pub c: R,
}

pub fn coeffs_fx<R: Scalar>(space: SpaceId, x: &Point<R>) -> Result<QuadraticCoeffs<R>> {
    if space != SpaceId::CubeSplit {
        return Err(Error::WrongSpace(space.as_str()));
    }
    x.check_dim(space)?;
    let (x1, x2) = x.cube_parts();
    let a = x1.det();
    let c = x2.det();
    let b = x1.adj().trace_mul(&x2);
    Ok(QuadraticCoeffs { a, b, c })
}

/// Evaluate the basic relative invariant (closed form).
pub fn eval_invariant<R: Scalar>(space: SpaceId, x: &Point<R>) -> Result<R> {
    x.check_dim(space)?;
    Ok(match space {
        SpaceId::Tate => x.0[0].clone(),
        SpaceId::Matrix2 => x.mat2().det(),
        SpaceId::CubeSplit => {
            let QuadraticCoeffs { a, b, c } = coeffs_fx(space, x)?;
            let four = a.from_i64_like(4);
            b.mul(&b).sub(&four.mul(&a).mul(&c))
        }
    })
}

/// Report from the randomized eigencharacter identity check.
#[derive(Clone, Debug)]
pub struct EigencharReport {
    pub space: SpaceId,
    pub trials: u64,
    pub failures: u64,
    /// First failing (point, group element) if any, for diagnostics.
    pub counterexample: Option<(Vec<Rat>, String)>,
}

/// Check f(x rho(g)) = omega(g) f(x) exactly over random integer points and
/// random invertible integer group elements. Failures are data, not errors.
pub fn check_eigencharacter(space: SpaceId, trials: u64, seed: u64) -> EigencharReport {
    let mut rng = SplitMix64::new(seed);
    let mut failures = 0;
    let mut counterexample = None;
    for _ in 0..trials {
        let x = sample_point_q(space, 9, &mut rng);
        let g = sample_group_element_q(space, 9, &mut rng).expect("sampling");
        let lhs = eval_invariant(space, &act(&x, &g).unwrap()).unwrap();
        let rhs = eigencharacter(&g).mul(&eval_invariant(space, &x).unwrap());
        if lhs != rhs {
            failures += 1;
            if counterexample.is_none() {
                counterexample = Some((x.0.clone(), format!("{g:?}")));
            }
        }
    }
    EigencharReport {
        space,
        trials,
        failures,
        counterexample,
    }
}

/// The log-derivative map phi_f(x) = f(x)^{-1} grad f(x), written in dual
/// coordinates through the trace pairing. For matrix2 this is x -> x^{-1}.
/// Errors with [`Error::BoundaryPoint`] when f(x) = 0.
pub fn log_derivative_map(space: SpaceId, x: &Point<Rat>) -> Result<Point<Rat>> {
    x.check_dim(space)?;
    let f = eval_invariant(space, x)?;
    if Zero::is_zero(&f) {
        return Err(Error::BoundaryPoint);
    }
    let finv = f.recip();
    Ok(match space {
        SpaceId::Tate => Point(vec![finv]),
        SpaceId::Matrix2 => {
            // d(det)(h) = tr(adj(x) h), so the dual vector is adj(x)/det(x) = x^{-1}
            let m = x.mat2().adj().scale(&finv);
            Point(m.e.to_vec())
        }
        SpaceId::CubeSplit => {
            let QuadraticCoeffs { a, b, c } = coeffs_fx(space, x)?;
            let (x1, x2) = x.cube_parts();
            let two_b = &b * crate::rat_int(2);
            let four_a = &a * crate::rat_int(4);
            let four_c = &c * crate::rat_int(4);
            // dP(h) = tr[(2b adj(x2) - 4c adj(x1)) h1] + tr[(2b adj(x1) - 4a adj(x2)) h2]
            let d1 = x2.adj().scale(&two_b).add(&x1.adj().scale(&four_c.neg()));
            let d2 = x1.adj().scale(&two_b).add(&x2.adj().scale(&four_a.neg()));
            Point::from_cube_parts(&d1.scale(&finv), &d2.scale(&finv))
        }
    })
}

/// Eigencharacter of the dual invariant under the dual action: the same
/// polynomial f, evaluated along dual_act, must transform by omega^{-1}.
/// Used by tests to validate the self-dual-coordinate convention.
pub fn dual_eigencharacter_holds(space: SpaceId, xd: &Point<Rat>, g: &GroupElement<Rat>) -> bool {
    let lhs = eval_invariant(space, &crate::pvs::dual_act(xd, g).unwrap()).unwrap();
    let om = eigencharacter(g);
    // omega is invertible for a valid group element
    lhs * om == eval_invariant(space, xd).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pvs::dual_act;
    use crate::{rat, rat_int};

    fn q(v: i64) -> Rat {
        rat_int(v)
    }

    fn qpt(coords: &[i64]) -> Point<Rat> {
        Point(coords.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn coeffs_fx_examples() {
        // (I, E12) -> (1, 0, 0)
        let x = qpt(&[1, 0, 0, 1, 0, 1, 0, 0]);
        let qc = coeffs_fx(SpaceId::CubeSplit, &x).unwrap();
        assert_eq!((qc.a, qc.b, qc.c), (q(1), q(0), q(0)));
        // (0, 0) -> (0, 0, 0)
        let z = qpt(&[0; 8]);
        let qc = coeffs_fx(SpaceId::CubeSplit, &z).unwrap();
        assert_eq!((qc.a, qc.b, qc.c), (q(0), q(0), q(0)));
        // (I, I) -> (1, 2, 1)
        let x = qpt(&[1, 0, 0, 1, 1, 0, 0, 1]);
        let qc = coeffs_fx(SpaceId::CubeSplit, &x).unwrap();
        assert_eq!((qc.a, qc.b, qc.c), (q(1), q(2), q(1)));
        // wrong space
        assert!(matches!(
            coeffs_fx(SpaceId::Tate, &qpt(&[1])),
            Err(Error::WrongSpace(_))
        ));
    }

    #[test]
    fn invariant_examples() {
        // cube: (I, diag(1,-1)) -> 4
        let x = qpt(&[1, 0, 0, 1, 1, 0, 0, -1]);
        assert_eq!(eval_invariant(SpaceId::CubeSplit, &x).unwrap(), q(4));
        // cube: (0, E12) -> 0
        let x = qpt(&[0, 0, 0, 0, 0, 1, 0, 0]);
        assert_eq!(eval_invariant(SpaceId::CubeSplit, &x).unwrap(), q(0));
        // matrix2: det I = 1
        assert_eq!(
            eval_invariant(SpaceId::Matrix2, &qpt(&[1, 0, 0, 1])).unwrap(),
            q(1)
        );
    }

    #[test]
    fn closed_form_matches_polynomial() {
        let mut rng = SplitMix64::new(77);
        for space in SpaceId::all() {
            let poly = invariant_polynomial(space);
            assert_eq!(poly.total_degree(), space.invariant_degree());
            for _ in 0..200 {
                let x = sample_point_q(space, 7, &mut rng);
                assert_eq!(poly.eval(&x.0), eval_invariant(space, &x).unwrap());
            }
        }
    }

    #[test]
    fn eigencharacter_identity_holds() {
        for space in SpaceId::all() {
            let rep = check_eigencharacter(space, 500, 42);
            assert_eq!(rep.failures, 0, "space {space}");
        }
    }

    #[test]
    fn dilation_case_pinned() {
        // x = (I, diag(1,-1)), g = (I, I, 2I): P goes 4 -> 64 = 16 * 4
        let x = qpt(&[1, 0, 0, 1, 1, 0, 0, -1]);
        let i = crate::matrix::Mat2::identity_like(&q(0));
        let g =
            GroupElement::new_cube(i.clone(), i.clone(), i.scale(&q(2))).unwrap();
        let y = act(&x, &g).unwrap();
        assert_eq!(eval_invariant(SpaceId::CubeSplit, &y).unwrap(), q(64));
    }

    #[test]
    fn homogeneity() {
        let mut rng = SplitMix64::new(3);
        for space in SpaceId::all() {
            for _ in 0..200 {
                let x = sample_point_q(space, 6, &mut rng);
                let s = rat(rng.range_i64(1, 9), rng.range_i64(1, 9));
                let sx = Point(x.0.iter().map(|c| c * &s).collect::<Vec<_>>());
                let mut spow = rat_int(1);
                for _ in 0..space.invariant_degree() {
                    spow *= &s;
                }
                assert_eq!(
                    eval_invariant(space, &sx).unwrap(),
                    spow * eval_invariant(space, &x).unwrap()
                );
            }
        }
    }

    #[test]
    fn log_derivative_examples() {
        // tate: x = 4 -> 1/4
        let d = log_derivative_map(SpaceId::Tate, &qpt(&[4])).unwrap();
        assert_eq!(d.0[0], rat(1, 4));
        // matrix2: diag(1,2) -> diag(1, 1/2)
        let d = log_derivative_map(SpaceId::Matrix2, &qpt(&[1, 0, 0, 2])).unwrap();
        assert_eq!(d.0, vec![q(1), q(0), q(0), rat(1, 2)]);
        // boundary
        assert!(matches!(
            log_derivative_map(SpaceId::Matrix2, &qpt(&[1, 0, 0, 0])),
            Err(Error::BoundaryPoint)
        ));
        // cube: x = (I, diag(1,-1)) -> grad P / 4 (here equal to x itself)
        let x = qpt(&[1, 0, 0, 1, 1, 0, 0, -1]);
        let d = log_derivative_map(SpaceId::CubeSplit, &x).unwrap();
        assert_eq!(d, x);
    }

    #[test]
    fn log_derivative_matches_symbolic_gradient() {
        let mut rng = SplitMix64::new(19);
        for space in SpaceId::all() {
            let poly = invariant_polynomial(space);
            let grads: Vec<MultiPoly> =
                (0..space.dim()).map(|i| poly.derivative(i)).collect();
            let mut done = 0;
            while done < 100 {
                let x = sample_point_q(space, 7, &mut rng);
                let f = eval_invariant(space, &x).unwrap();
                if Zero::is_zero(&f) {
                    continue;
                }
                done += 1;
                let d = log_derivative_map(space, &x).unwrap();
                // pairing-induced dual coordinates: <phi(x), h> = dP(h)/P must
                // match the coordinate gradient route for every basis vector h
                for j in 0..space.dim() {
                    let mut h = vec![q(0); space.dim()];
                    h[j] = q(1);
                    let lhs = crate::pvs::pairing(space, &d, &Point(h)).unwrap();
                    let rhs = grads[j].eval(&x.0) / &f;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn log_derivative_equivariance_and_dual_nonvanishing() {
        let mut rng = SplitMix64::new(101);
        for space in SpaceId::all() {
            let mut done = 0;
            while done < 150 {
                let x = sample_point_q(space, 6, &mut rng);
                if Zero::is_zero(&eval_invariant(space, &x).unwrap()) {
                    continue;
                }
                done += 1;
                let g = sample_group_element_q(space, 5, &mut rng).unwrap();
                let lhs = log_derivative_map(space, &act(&x, &g).unwrap()).unwrap();
                let rhs = dual_act(&log_derivative_map(space, &x).unwrap(), &g).unwrap();
                assert_eq!(lhs, rhs);
                // dual invariant does not vanish on the image of the open orbit
                let dual_val =
                    eval_invariant(space, &log_derivative_map(space, &x).unwrap()).unwrap();
                assert!(!Zero::is_zero(&dual_val));
            }
        }
    }

    /// The dual basic invariant is the same polynomial in self-dual
    /// coordinates; it must transform by omega^{-1} under the dual action.
    #[test]
    fn dual_invariant_has_opposite_eigencharacter() {
        let mut rng = SplitMix64::new(55);
        for space in SpaceId::all() {
            for _ in 0..200 {
                let xd = sample_point_q(space, 6, &mut rng);
                let g = sample_group_element_q(space, 5, &mut rng).unwrap();
                assert!(dual_eigencharacter_holds(space, &xd, &g));
            }
        }
    }
}
