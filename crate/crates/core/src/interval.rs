//! Closed intervals with outward rounding, generic over the endpoint type.

use std::fmt::Debug;
use std::sync::OnceLock;
use std::sync::Mutex;

use num_traits::Zero;

use crate::dyadic::{Dir, Dyadic};
use crate::Rational;

/// Endpoint arithmetic with a rounding direction.
pub trait Bound: Clone + PartialOrd + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(r: &Rational, prec: u32, dir: Dir) -> Self;
    fn neg(&self) -> Self;
    fn add_r(&self, o: &Self, prec: u32, dir: Dir) -> Self;
    fn sub_r(&self, o: &Self, prec: u32, dir: Dir) -> Self;
    fn mul_r(&self, o: &Self, prec: u32, dir: Dir) -> Self;
    fn div_r(&self, o: &Self, prec: u32, dir: Dir) -> Self;
    fn signum(&self) -> i32;
    fn to_f64(&self) -> f64;
    /// Directed conversion to `f64`.
    fn to_f64_dir(&self, dir: Dir) -> f64;
}

impl Bound for Dyadic {
    fn zero() -> Self {
        Dyadic::zero()
    }
    fn one() -> Self {
        Dyadic::one()
    }
    fn from_i64(n: i64) -> Self {
        Dyadic::from_int(n)
    }
    fn from_ratio(r: &Rational, prec: u32, dir: Dir) -> Self {
        Dyadic::from_ratio(r, prec, dir)
    }
    fn neg(&self) -> Self {
        Dyadic::neg(self)
    }
    fn add_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        Dyadic::add_r(self, o, prec, dir)
    }
    fn sub_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        Dyadic::sub_r(self, o, prec, dir)
    }
    fn mul_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        Dyadic::mul_r(self, o, prec, dir)
    }
    fn div_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        Dyadic::div_r(self, o, prec, dir)
    }
    fn signum(&self) -> i32 {
        Dyadic::signum(self)
    }
    fn to_f64(&self) -> f64 {
        self.to_f64_nearest()
    }
    fn to_f64_dir(&self, dir: Dir) -> f64 {
        Dyadic::to_f64_dir(self, dir)
    }
}

fn nudge(x: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Down => x.next_down(),
        Dir::Up => x.next_up(),
    }
}

// Hardware rounding is to nearest, so one ulp of slack in the requested
// direction always covers the exact result.
impl Bound for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        let f = n as f64;
        if f as i64 == n && f.abs() < 9.0e15 {
            f
        } else {
            Dyadic::from_int(n).to_f64_dir(Dir::Down)
        }
    }
    fn from_ratio(r: &Rational, _prec: u32, dir: Dir) -> Self {
        Dyadic::from_ratio(r, 64, dir).to_f64_dir(dir)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn add_r(&self, o: &Self, _p: u32, dir: Dir) -> Self {
        let s = self + o;
        if s.is_infinite() || nudge_free_add(*self, *o, s) {
            s
        } else {
            nudge(s, dir)
        }
    }
    fn sub_r(&self, o: &Self, p: u32, dir: Dir) -> Self {
        self.add_r(&-*o, p, dir)
    }
    fn mul_r(&self, o: &Self, _p: u32, dir: Dir) -> Self {
        let m = self * o;
        if m == 0.0 && (*self == 0.0 || *o == 0.0) {
            return 0.0;
        }
        if m.is_infinite() {
            return m;
        }
        nudge(m, dir)
    }
    fn div_r(&self, o: &Self, _p: u32, dir: Dir) -> Self {
        let q = self / o;
        if *self == 0.0 {
            return 0.0;
        }
        if q.is_infinite() {
            return q;
        }
        nudge(q, dir)
    }
    fn signum(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_f64_dir(&self, _dir: Dir) -> f64 {
        *self
    }
}

// exact when one operand is zero; otherwise not known cheaply
fn nudge_free_add(a: f64, b: f64, _s: f64) -> bool {
    a == 0.0 || b == 0.0
}

/// A closed interval `[lo, hi]` with a working precision for its endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<B: Bound> {
    pub lo: B,
    pub hi: B,
    pub prec: u32,
}

fn pmin<B: Bound>(a: B, b: B) -> B {
    if a <= b {
        a
    } else {
        b
    }
}

fn pmax<B: Bound>(a: B, b: B) -> B {
    if a >= b {
        a
    } else {
        b
    }
}

impl<B: Bound> Interval<B> {
    pub fn new(lo: B, hi: B, prec: u32) -> Self {
        assert!(lo <= hi, "inverted interval {:?} > {:?}", lo, hi);
        Interval { lo, hi, prec }
    }

    pub fn point(x: B, prec: u32) -> Self {
        Interval { lo: x.clone(), hi: x, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(B::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::point(B::one(), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_ratio(&Rational::from_integer(n.into()), prec)
    }

    pub fn from_ratio(r: &Rational, prec: u32) -> Self {
        Interval {
            lo: B::from_ratio(r, prec, Dir::Down),
            hi: B::from_ratio(r, prec, Dir::Up),
            prec,
        }
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        Interval {
            lo: self.lo.add_r(&o.lo, p, Dir::Down),
            hi: self.hi.add_r(&o.hi, p, Dir::Up),
            prec: p,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        let cands_lo = [
            self.lo.mul_r(&o.lo, p, Dir::Down),
            self.lo.mul_r(&o.hi, p, Dir::Down),
            self.hi.mul_r(&o.lo, p, Dir::Down),
            self.hi.mul_r(&o.hi, p, Dir::Down),
        ];
        let cands_hi = [
            self.lo.mul_r(&o.lo, p, Dir::Up),
            self.lo.mul_r(&o.hi, p, Dir::Up),
            self.hi.mul_r(&o.lo, p, Dir::Up),
            self.hi.mul_r(&o.hi, p, Dir::Up),
        ];
        let lo = cands_lo.into_iter().reduce(pmin).unwrap();
        let hi = cands_hi.into_iter().reduce(pmax).unwrap();
        Interval { lo, hi, prec: p }
    }

    pub fn sqr(&self) -> Self {
        let p = self.prec;
        if self.lo.signum() >= 0 {
            Interval { lo: self.lo.mul_r(&self.lo, p, Dir::Down), hi: self.hi.mul_r(&self.hi, p, Dir::Up), prec: p }
        } else if self.hi.signum() <= 0 {
            Interval { lo: self.hi.mul_r(&self.hi, p, Dir::Down), hi: self.lo.mul_r(&self.lo, p, Dir::Up), prec: p }
        } else {
            let a = self.lo.mul_r(&self.lo, p, Dir::Up);
            let b = self.hi.mul_r(&self.hi, p, Dir::Up);
            Interval { lo: B::zero(), hi: pmax(a, b), prec: p }
        }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let p = self.prec.max(o.prec);
        let cands_lo = [
            self.lo.div_r(&o.lo, p, Dir::Down),
            self.lo.div_r(&o.hi, p, Dir::Down),
            self.hi.div_r(&o.lo, p, Dir::Down),
            self.hi.div_r(&o.hi, p, Dir::Down),
        ];
        let cands_hi = [
            self.lo.div_r(&o.lo, p, Dir::Up),
            self.lo.div_r(&o.hi, p, Dir::Up),
            self.hi.div_r(&o.lo, p, Dir::Up),
            self.hi.div_r(&o.hi, p, Dir::Up),
        ];
        let lo = cands_lo.into_iter().reduce(pmin).unwrap();
        let hi = cands_hi.into_iter().reduce(pmax).unwrap();
        Some(Interval { lo, hi, prec: p })
    }

    pub fn recip(&self) -> Option<Self> {
        Self::one(self.prec).div(self)
    }

    /// Integer power by repeated squaring; negative exponents need a
    /// zero-free interval.
    pub fn powi(&self, k: i64) -> Option<Self> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.prec);
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        Some(acc)
    }

    pub fn scale_ratio(&self, r: &Rational) -> Self {
        self.mul(&Self::from_ratio(r, self.prec))
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, x: &B) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_ratio(&self, r: &Rational) -> bool {
        B::from_ratio(r, self.prec.max(64), Dir::Up) >= self.lo && B::from_ratio(r, self.prec.max(64), Dir::Down) <= self.hi
    }

    pub fn is_pos(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_neg(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Sign when certain.
    pub fn sign(&self) -> Option<i32> {
        if self.is_pos() {
            Some(1)
        } else if self.is_neg() {
            Some(-1)
        } else if self.lo.signum() == 0 && self.hi.signum() == 0 {
            Some(0)
        } else {
            None
        }
    }

    pub fn width(&self) -> B {
        self.hi.sub_r(&self.lo, self.prec, Dir::Up)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_dir(Dir::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    /// Half the width, rounded up, as a crude `f64` error radius.
    pub fn radius_f64(&self) -> f64 {
        let w = self.width_f64();
        if w == 0.0 {
            return 0.0;
        }
        (0.5 * w).next_up()
    }

    pub fn intersects(&self, o: &Self) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn hull(&self, o: &Self) -> Self {
        Interval {
            lo: pmin(self.lo.clone(), o.lo.clone()),
            hi: pmax(self.hi.clone(), o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    pub fn is_inside(&self, o: &Self) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    /// Certified `self < o`.
    pub fn lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    pub fn to_f64_interval(&self) -> Interval<f64> {
        Interval { lo: self.lo.to_f64_dir(Dir::Down), hi: self.hi.to_f64_dir(Dir::Up), prec: 53 }
    }
}

impl Interval<Dyadic> {
    /// Enclosure of `sqrt(r)` for a positive rational.
    pub fn sqrt_ratio(r: &Rational, prec: u32) -> Self {
        Self::root_ratio(r, 2, prec)
    }

    /// Enclosure of the positive real `n`-th root of a positive rational.
    pub fn root_ratio(r: &Rational, n: u32, prec: u32) -> Self {
        assert!(r > &Rational::zero());
        // r^(1/n) = (p q^(n-1))^(1/n) / q
        let p = r.numer();
        let q = r.denom();
        let k = prec as u64 + 4;
        let big = (p * q.pow(n - 1)) << (n as u64 * k);
        let lo_i = big.nth_root(n);
        let hi_i = if lo_i.pow(n) == big { lo_i.clone() } else { &lo_i + 1u32 };
        let qd = Dyadic::from_int(q.clone()).mul_pow2(k as i64);
        let lo = Dyadic::from_int(lo_i).div_r(&qd, prec, Dir::Down);
        let hi = Dyadic::from_int(hi_i).div_r(&qd, prec, Dir::Up);
        Interval { lo, hi, prec }
    }

    /// Natural logarithm of a positive interval; `None` otherwise.
    pub fn ln(&self) -> Option<Self> {
        if !self.is_pos() {
            return None;
        }
        let lo = ln_point(&self.lo, self.prec);
        let hi = ln_point(&self.hi, self.prec);
        Some(Interval { lo: lo.lo, hi: hi.hi, prec: self.prec })
    }
}

fn ln2(prec: u32) -> Interval<Dyadic> {
    static CACHE: OnceLock<Mutex<Option<Interval<Dyadic>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().expect("ln2 cache");
    if let Some(c) = guard.as_ref() {
        if c.prec >= prec {
            return Interval { lo: c.lo.round(prec, Dir::Down), hi: c.hi.round(prec, Dir::Up), prec };
        }
    }
    let third = Interval::from_ratio(&Rational::new(1.into(), 3.into()), prec + 16);
    let v = atanh_series(&third).mul(&Interval::from_i64(2, prec + 16));
    *guard = Some(v.clone());
    Interval { lo: v.lo.round(prec, Dir::Down), hi: v.hi.round(prec, Dir::Up), prec }
}

// atanh(z) for |z| <= 1/2 by its odd power series with a geometric tail bound
fn atanh_series(z: &Interval<Dyadic>) -> Interval<Dyadic> {
    let prec = z.prec;
    let z2 = z.sqr();
    let mut term = z.clone();
    let mut sum = Interval::zero(prec);
    let mut k: i64 = 0;
    let eps = Dyadic::pow2(-(prec as i64) - 4);
    loop {
        let denom = Interval::from_i64(2 * k + 1, prec);
        sum = sum.add(&term.div(&denom).expect("odd denominator"));
        term = term.mul(&z2);
        k += 1;
        let mag = term.lo.abs().max(term.hi.abs());
        if mag < eps {
            // remaining terms are bounded by |z|^(2k+1) / (1 - z^2) <= 4/3 mag
            let tail = mag.mul_r(&Dyadic::from_int(2), prec, Dir::Up);
            return Interval { lo: sum.lo.sub_r(&tail, prec, Dir::Down), hi: sum.hi.add_r(&tail, prec, Dir::Up), prec };
        }
    }
}

fn ln_point(x: &Dyadic, prec: u32) -> Interval<Dyadic> {
    let wp = prec + 24;
    // x = m 2^e with m in [1/sqrt2, sqrt2)
    let mut e = x.ilog2();
    let mut m = x.mul_pow2(-e);
    // m in [1, 2); shift down when above sqrt 2 (compare m^2 with 2)
    if m.mul(&m) > Dyadic::from_int(2) {
        m = m.mul_pow2(-1);
        e += 1;
    }
    let mi = Interval::point(m, wp);
    let one = Interval::one(wp);
    let z = mi.sub(&one).div(&mi.add(&one)).expect("positive mantissa");
    let lnm = atanh_series(&z).mul(&Interval::from_i64(2, wp));
    let res = lnm.add(&ln2(wp).mul(&Interval::from_i64(e, wp)));
    Interval { lo: res.lo.round(prec, Dir::Down), hi: res.hi.round(prec, Dir::Up), prec }
}

#[cfg(test)]
mod tests {
    use super::*;

    type DI = Interval<Dyadic>;

    #[test]
    fn ln_known_values() {
        let two = DI::from_i64(2, 128);
        let l = two.ln().unwrap();
        assert!((l.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(l.width_f64() < 1e-35);
        let one = DI::one(128).ln().unwrap();
        assert!(one.contains_zero());
        let big = DI::from_i64(1_000_000, 200).ln().unwrap();
        assert!((big.mid_f64() - 1_000_000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_is_additive() {
        let a = DI::from_ratio(&Rational::new(7.into(), 3.into()), 160);
        let b = DI::from_ratio(&Rational::new(11.into(), 5.into()), 160);
        let lhs = a.mul(&b).ln().unwrap();
        let rhs = a.ln().unwrap().add(&b.ln().unwrap());
        assert!(lhs.intersects(&rhs));
    }

    #[test]
    fn cube_root_brackets() {
        let r = Rational::from_integer(12769.into());
        let c = DI::root_ratio(&r, 3, 100);
        let c3 = c.mul(&c).mul(&c);
        assert!(c3.contains_ratio(&r));
        assert!(c.width_f64() < 1e-25);
    }

    #[test]
    fn f64_intervals_enclose() {
        let a = Interval::<f64>::from_ratio(&Rational::new(1.into(), 3.into()), 53);
        let b = Interval::<f64>::from_ratio(&Rational::new(1.into(), 7.into()), 53);
        let p = a.mul(&b);
        assert!(p.contains_ratio(&Rational::new(1.into(), 21.into())));
        let q = a.div(&b).unwrap();
        assert!(q.contains_ratio(&Rational::new(7.into(), 3.into())));
    }

    #[test]
    fn powi_negative() {
        let a = DI::from_ratio(&Rational::new(3.into(), 2.into()), 90);
        let p = a.powi(-5).unwrap();
        assert!(p.contains_ratio(&Rational::new(32.into(), 243.into())));
    }
}
