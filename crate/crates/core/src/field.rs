//! Exact arithmetic in a cubic field given by a possibly non-monic polynomial.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{sign_variations, ExactScalar, Poly};
use crate::Rational;

/// `c3 x^3 + c2 x^2 + c1 x + c0`, stored as `[c0, c1, c2, c3]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec<Q> {
    coeffs: [Q; 4],
}

impl<Q: ExactScalar> FieldSpec<Q> {
    /// Validates irreducibility and three distinct real roots.
    pub fn new(coeffs: [Q; 4]) -> Result<Arc<Self>> {
        if coeffs[3].is_zero() {
            return Err(Error::InvalidField("leading coefficient is zero".into()));
        }
        let spec = FieldSpec { coeffs };
        let f = spec.rational_poly();
        if let Some(r) = rational_root(&f) {
            return Err(Error::NotIrreducible(r.to_string()));
        }
        let n = count_real_roots(&f);
        if n != 3 {
            return Err(Error::NotTotallyReal(n));
        }
        Ok(Arc::new(spec))
    }

    pub fn degree(&self) -> usize {
        3
    }

    pub fn coeffs(&self) -> &[Q; 4] {
        &self.coeffs
    }

    pub fn poly(&self) -> Poly<Q> {
        Poly::new(self.coeffs.to_vec())
    }

    pub fn rational_poly(&self) -> Poly<Rational> {
        Poly::new(self.coeffs.iter().map(|c| c.to_rational()).collect())
    }
}

fn cauchy_bound(f: &Poly<Rational>) -> BigInt {
    let lead = f.lead().abs();
    let m = f.coeffs[..f.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / lead.clone())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    (m + Rational::one()).ceil().to_integer()
}

pub(crate) fn count_real_roots(f: &Poly<Rational>) -> usize {
    let b = Rational::from_integer(cauchy_bound(f) + 1);
    let ch = f.sturm_chain();
    sign_variations(&ch, &(-b.clone())) - sign_variations(&ch, &b)
}

/// A rational root of a polynomial, if any.
pub(crate) fn rational_root(f: &Poly<Rational>) -> Option<Rational> {
    // clear denominators, then z = a_n x turns it into a monic integer
    // polynomial whose rational roots are integers
    let l = f.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let a: Vec<BigInt> = f.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let n = a.len() - 1;
    let an = a[n].clone();
    let g: Vec<Rational> = (0..=n)
        .map(|i| if i == n { Rational::one() } else { Rational::from_integer(&a[i] * an.pow((n - 1 - i) as u32)) })
        .collect();
    let g = Poly::new(g);
    let bound = cauchy_bound(&g);
    let half = Rational::new(1.into(), 2.into());
    let ch = g.sturm_chain();
    let mut stack = vec![(-Rational::from_integer(bound.clone()) - half.clone(), Rational::from_integer(bound) + half.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let c = sign_variations(&ch, &lo) as i64 - sign_variations(&ch, &hi) as i64;
        if c == 0 {
            continue;
        }
        if &hi - &lo <= Rational::one() {
            let k = (&lo + &half).to_integer();
            let kr = Rational::from_integer(k);
            if g.eval(&kr).is_zero() {
                return Some(kr / Rational::from_integer(an));
            }
            continue;
        }
        let mid = ((&lo + &hi) / Rational::from_integer(2.into()) - half.clone()).floor() + half.clone();
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    None
}

/// `a0 + a1 y + a2 y^2` with exact coordinates.
#[derive(Clone)]
pub struct FieldElement<Q> {
    coords: [Q; 3],
    spec: Arc<FieldSpec<Q>>,
}

impl<Q: ExactScalar> PartialEq for FieldElement<Q> {
    fn eq(&self, o: &Self) -> bool {
        self.coords == o.coords && (Arc::ptr_eq(&self.spec, &o.spec) || self.spec == o.spec)
    }
}

impl<Q: ExactScalar> Eq for FieldElement<Q> {}

impl<Q: ExactScalar> fmt::Debug for FieldElement<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl<Q: ExactScalar> fmt::Display for FieldElement<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (i, mag.is_one()) {
                (0, _) => format!("{}", mag),
                (1, true) => "y".to_string(),
                (_, true) => "y^2".to_string(),
                (1, false) => format!("{}*y", mag),
                (_, false) => format!("{}*y^2", mag),
            };
            parts.push((sign, body));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, b)) in parts.iter().enumerate() {
            match (k, *s) {
                (0, "-") => write!(f, "-{}", b)?,
                (0, _) => write!(f, "{}", b)?,
                (_, s) => write!(f, " {} {}", s, b)?,
            }
        }
        Ok(())
    }
}

impl<Q: ExactScalar> FieldElement<Q> {
    pub fn new(spec: &Arc<FieldSpec<Q>>, coords: [Q; 3]) -> Self {
        FieldElement { coords, spec: spec.clone() }
    }

    pub fn from_scalar(spec: &Arc<FieldSpec<Q>>, q: Q) -> Self {
        Self::new(spec, [q, Q::zero(), Q::zero()])
    }

    pub fn from_int(spec: &Arc<FieldSpec<Q>>, n: i64) -> Self {
        Self::from_scalar(spec, Q::from_i64(n).expect("integer scalar"))
    }

    pub fn zero(spec: &Arc<FieldSpec<Q>>) -> Self {
        Self::from_scalar(spec, Q::zero())
    }

    pub fn one(spec: &Arc<FieldSpec<Q>>) -> Self {
        Self::from_scalar(spec, Q::one())
    }

    /// The generator `y`.
    pub fn gen(spec: &Arc<FieldSpec<Q>>) -> Self {
        Self::new(spec, [Q::zero(), Q::one(), Q::zero()])
    }

    pub fn coords(&self) -> &[Q; 3] {
        &self.coords
    }

    pub fn spec(&self) -> &Arc<FieldSpec<Q>> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1].is_zero() && self.coords[2].is_zero()
    }

    fn same_field(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &o.spec) || self.spec == o.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.add_unchecked(o))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn add_unchecked(&self, o: &Self) -> Self {
        let c = [
            self.coords[0].clone() + o.coords[0].clone(),
            self.coords[1].clone() + o.coords[1].clone(),
            self.coords[2].clone() + o.coords[2].clone(),
        ];
        Self::new(&self.spec, c)
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let mut p: [Q; 5] = std::array::from_fn(|_| Q::zero());
        for i in 0..3 {
            if self.coords[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                p[i + j] = p[i + j].clone() + self.coords[i].clone() * o.coords[j].clone();
            }
        }
        let c = &self.spec.coeffs;
        // y^3 = -(c0 + c1 y + c2 y^2) / c3, applied from the top degree down
        for k in (3..5).rev() {
            let t = std::mem::replace(&mut p[k], Q::zero());
            if t.is_zero() {
                continue;
            }
            let t = t / c[3].clone();
            for j in 0..3 {
                p[k - 3 + j] = p[k - 3 + j].clone() - t.clone() * c[j].clone();
            }
        }
        let [a0, a1, a2, _, _] = p;
        Self::new(&self.spec, [a0, a1, a2])
    }

    pub fn scale(&self, q: &Q) -> Self {
        Self::new(&self.spec, self.coords.clone().map(|c| c * q.clone()))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInversion);
        }
        let a = Poly::new(self.coords.to_vec());
        let (g, s, _) = Poly::ext_gcd(&a, &self.spec.poly());
        debug_assert_eq!(g.degree(), Some(0));
        let s = s.rem(&self.spec.poly());
        let mut c: [Q; 3] = std::array::from_fn(|_| Q::zero());
        for (i, v) in s.coeffs.into_iter().enumerate() {
            c[i] = v;
        }
        Ok(Self::new(&self.spec, c))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.try_mul(&o.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::one(&self.spec);
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `self`; column `j` holds `self * y^j`.
    pub fn mul_matrix(&self) -> [[Q; 3]; 3] {
        let mut cols = Vec::with_capacity(3);
        let mut b = Self::one(&self.spec);
        let y = Self::gen(&self.spec);
        for _ in 0..3 {
            cols.push(self.mul_unchecked(&b).coords);
            b = b.mul_unchecked(&y);
        }
        std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
    }

    pub fn norm(&self) -> Q {
        det3(&self.mul_matrix())
    }

    pub fn trace(&self) -> Q {
        let m = self.mul_matrix();
        m[0][0].clone() + m[1][1].clone() + m[2][2].clone()
    }
}

pub fn det3<Q: ExactScalar>(m: &[[Q; 3]; 3]) -> Q {
    let t = |a: usize, b: usize, c: usize| m[0][a].clone() * m[1][b].clone() * m[2][c].clone();
    t(0, 1, 2) + t(1, 2, 0) + t(2, 0, 1) - t(2, 1, 0) - t(0, 2, 1) - t(1, 0, 2)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, Q: ExactScalar> $tr<&'a FieldElement<Q>> for &'a FieldElement<Q> {
            type Output = FieldElement<Q>;
            fn $m(self, o: &'a FieldElement<Q>) -> FieldElement<Q> {
                assert!(self.same_field(o).is_ok(), "elements belong to different fields");
                $body(self, o)
            }
        }
        impl<Q: ExactScalar> $tr<FieldElement<Q>> for FieldElement<Q> {
            type Output = FieldElement<Q>;
            fn $m(self, o: FieldElement<Q>) -> FieldElement<Q> {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add, |a: &FieldElement<Q>, b: &FieldElement<Q>| a.add_unchecked(b));
binop!(Sub, sub, |a: &FieldElement<Q>, b: &FieldElement<Q>| a.add_unchecked(&-b));
binop!(Mul, mul, |a: &FieldElement<Q>, b: &FieldElement<Q>| a.mul_unchecked(b));

impl<Q: ExactScalar> Neg for &FieldElement<Q> {
    type Output = FieldElement<Q>;
    fn neg(self) -> FieldElement<Q> {
        FieldElement::new(&self.spec, self.coords.clone().map(|c| -c))
    }
}

impl<Q: ExactScalar> Neg for FieldElement<Q> {
    type Output = FieldElement<Q>;
    fn neg(self) -> FieldElement<Q> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Element};

    fn spec() -> Arc<FieldSpec<Rational>> {
        FieldSpec::new([rat(1), rat(-1), rat(-4), rat(2)]).unwrap()
    }

    fn el(s: &Arc<FieldSpec<Rational>>, c: [i64; 3]) -> Element {
        Element::new(s, c.map(rat))
    }

    #[test]
    fn y_cubed_reduces() {
        let s = spec();
        let y = Element::gen(&s);
        let y2 = &y * &y;
        assert_eq!(&y * &y2, Element::new(&s, [Rational::new((-1).into(), 2.into()), Rational::new(1.into(), 2.into()), rat(2)]));
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(matches!(FieldSpec::new([rat(-2), rat(0), rat(0), rat(1)]), Err(Error::NotTotallyReal(1))));
        // (x - 1)(x^2 - 3)
        assert!(matches!(FieldSpec::new([rat(3), rat(-3), rat(-1), rat(1)]), Err(Error::NotIrreducible(_))));
        // (2x - 1)(x^2 - 5)
        assert!(matches!(FieldSpec::new([rat(5), rat(-10), rat(-1), rat(2)]), Err(Error::NotIrreducible(_))));
        assert!(matches!(FieldSpec::new([rat(0), rat(1), rat(1), rat(1)]), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn inverse_and_norm() {
        let s = spec();
        let g1 = el(&s, [113, 152, -96]);
        let pi = el(&s, [177, -488, 192]);
        assert!((&g1 * &g1.inv().unwrap()).is_one());
        assert!((&pi * &pi.inv().unwrap()).is_one());
        assert_eq!(g1.norm(), rat(1));
        assert_eq!(pi.norm(), rat(12769));
        assert_eq!(Element::one(&s).trace(), rat(3));
        assert_eq!(g1.pow(0).unwrap(), Element::one(&s));
        assert_eq!(g1.pow(-2).unwrap(), (&g1 * &g1).inv().unwrap());
        assert!(Element::zero(&s).inv().is_err());
    }

    #[test]
    fn display_is_readable() {
        let s = spec();
        assert_eq!(el(&s, [113, 152, -96]).to_string(), "113 + 152*y - 96*y^2");
        assert_eq!(el(&s, [0, -1, 0]).to_string(), "-y");
        assert_eq!(Element::zero(&s).to_string(), "0");
    }

    #[test]
    fn generic_over_small_rationals() {
        use num_rational::Rational64;
        let s = FieldSpec::new([Rational64::from(1), Rational64::from(-1), Rational64::from(-4), Rational64::from(2)]).unwrap();
        let y = FieldElement::gen(&s);
        let y3 = y.pow(3).unwrap();
        assert_eq!(y3.coords()[2], Rational64::from(2));
        assert_eq!(y.norm(), Rational64::new(-1, 2));
    }
}
