//! Exact scalar trait and dense univariate polynomials over it.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

use crate::Rational;

/// An exact ordered field of characteristic zero.
pub trait ExactScalar: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static {
    /// Embed into the arbitrary-precision rationals.
    fn to_rational(&self) -> Rational;
}

impl ExactScalar for Ratio<BigInt> {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

impl ExactScalar for Ratio<i64> {
    fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

/// Dense polynomial, coefficients from the constant term up, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<Q> {
    pub coeffs: Vec<Q>,
}

impl<Q: ExactScalar> Poly<Q> {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * Q::from_usize(i).unwrap())
            .collect();
        Poly::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_else(Q::zero) + o.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
            })
            .collect();
        Poly::new(c)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        let mut q = vec![Q::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let t = r.last().unwrap().clone() / lead.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - t.clone() * dc.clone();
            }
            q[k] = t;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::new(vec![Q::one()]), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::new(vec![Q::one()]));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = Q::one() / r0.lead();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }
}

/// Sign changes of a Sturm chain evaluated at `x`.
pub fn sign_variations<Q: ExactScalar>(chain: &[Poly<Q>], x: &Q) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for p in chain {
        let e = p.eval(x);
        let s = if e.is_positive() {
            1
        } else if e.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}
