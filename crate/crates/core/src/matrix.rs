//! 2x2 matrices over a generic scalar, row-major.

use crate::ring::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct Mat2<R: Scalar> {
    /// Entries [a, b, c, d] for [[a, b], [c, d]].
    pub e: [R; 4],
}

impl<R: Scalar> Mat2<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Self {
        Mat2 { e: [a, b, c, d] }
    }

    pub fn from_slice(s: &[R]) -> Self {
        assert_eq!(s.len(), 4);
        Mat2 {
            e: [s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone()],
        }
    }

    pub fn identity_like(witness: &R) -> Self {
        let z = witness.zero_like();
        let o = witness.one_like();
        Mat2::new(o.clone(), z.clone(), z, o)
    }

    pub fn zero_like(witness: &R) -> Self {
        let z = witness.zero_like();
        Mat2::new(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn det(&self) -> R {
        self.e[0].mul(&self.e[3]).sub(&self.e[1].mul(&self.e[2]))
    }

    /// Adjugate: adj(x) * x = det(x) * I. Linear in x for 2x2.
    pub fn adj(&self) -> Self {
        Mat2::new(
            self.e[3].clone(),
            self.e[1].neg(),
            self.e[2].neg(),
            self.e[0].clone(),
        )
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(
            self.e[0].clone(),
            self.e[2].clone(),
            self.e[1].clone(),
            self.e[3].clone(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2::new(
            self.e[0].mul(&o.e[0]).add(&self.e[1].mul(&o.e[2])),
            self.e[0].mul(&o.e[1]).add(&self.e[1].mul(&o.e[3])),
            self.e[2].mul(&o.e[0]).add(&self.e[3].mul(&o.e[2])),
            self.e[2].mul(&o.e[1]).add(&self.e[3].mul(&o.e[3])),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(
            self.e[0].add(&o.e[0]),
            self.e[1].add(&o.e[1]),
            self.e[2].add(&o.e[2]),
            self.e[3].add(&o.e[3]),
        )
    }

    pub fn scale(&self, c: &R) -> Self {
        Mat2::new(
            self.e[0].mul(c),
            self.e[1].mul(c),
            self.e[2].mul(c),
            self.e[3].mul(c),
        )
    }

    /// Trace of self * other, i.e. the Trd pairing for split quaternions.
    pub fn trace_mul(&self, o: &Self) -> R {
        // tr([[a,b],[c,d]][[a',b'],[c',d']]) = a a' + b c' + c b' + d d'
        self.e[0]
            .mul(&o.e[0])
            .add(&self.e[1].mul(&o.e[2]))
            .add(&self.e[2].mul(&o.e[1]))
            .add(&self.e[3].mul(&o.e[3]))
    }

    /// Inverse when det is a unit of the ring.
    pub fn try_inv(&self) -> Option<Self> {
        let dinv = self.det().try_inv()?;
        Some(self.adj().scale(&dinv))
    }
}
