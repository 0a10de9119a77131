//! Binary floating numbers with arbitrary mantissa and explicit rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

/// `mant * 2^exp`, kept with an odd mantissa (or the zero value).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn shr_dir(m: &BigInt, s: u64, dir: Dir) -> BigInt {
    // floor or ceil of m / 2^s
    let q = m >> s;
    match dir {
        Dir::Down => q,
        Dir::Up => {
            if (&q << s) == *m {
                q
            } else {
                q + 1
            }
        }
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Position of the leading bit: `2^(msb-1) <= |x| < 2^msb`.
    pub fn msb(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &o.mant << (o.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to at most `prec` mantissa bits.
    pub fn round(&self, prec: u32, dir: Dir) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Self::new(shr_dir(&self.mant, s, dir), self.exp + s as i64)
    }

    pub fn add_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        // avoid building huge aligned mantissas when the exponents are far apart
        if !self.is_zero() && !o.is_zero() {
            let (big, small) = if self.msb() >= o.msb() { (self, o) } else { (o, self) };
            if big.msb() - small.msb() > prec as i64 + 4 {
                let guard = big.msb() - prec as i64 - 4;
                // |small| < tiny, so the sum lies strictly between big and big +- tiny
                let tiny = Dyadic::pow2(guard - 1);
                let up = small.signum() > 0;
                return match (dir, up) {
                    (Dir::Down, true) | (Dir::Up, false) => big.round(prec, dir),
                    (Dir::Up, true) => big.add(&tiny).round(prec, dir),
                    (Dir::Down, false) => big.sub(&tiny).round(prec, dir),
                };
            }
        }
        self.add(o).round(prec, dir)
    }

    pub fn sub_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        self.add_r(&o.neg(), prec, dir)
    }

    pub fn mul_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        self.mul(o).round(prec, dir)
    }

    /// Quotient rounded to `prec` bits. Panics on division by zero.
    pub fn div_r(&self, o: &Self, prec: u32, dir: Dir) -> Self {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        // scale numerator so that the integer quotient has about prec+2 bits
        let shift = (prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let num = &self.mant << shift;
        let (q, r) = num.div_mod_floor(&o.mant);
        let q = if dir == Dir::Up && !r.is_zero() { q + 1 } else { q };
        Self::new(q, self.exp - o.exp - shift as i64).round(prec, dir)
    }

    pub fn from_ratio(r: &Rational, prec: u32, dir: Dir) -> Self {
        let n = Dyadic::from_int(r.numer().clone());
        let d = Dyadic::from_int(r.denom().clone());
        if d.mant.is_one() && d.exp == 0 {
            return n.round(prec, dir);
        }
        n.div_r(&d, prec, dir)
    }

    pub fn to_ratio(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Directed conversion to `f64`; overflow saturates to infinity in the
    /// outward direction and underflow to zero or the least subnormal.
    pub fn to_f64_dir(&self, dir: Dir) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let m = r.mant.to_f64().expect("53-bit mantissa");
        let v = scale2(m, r.exp);
        if v == 0.0 || !v.is_finite() || v.is_subnormal() {
            let exact = self.to_f64_nearest();
            return match dir {
                Dir::Down if exact_gt_f64(self, exact) => exact,
                Dir::Down => exact.next_down(),
                Dir::Up if exact_lt_f64(self, exact) => exact,
                Dir::Up => exact.next_up(),
            };
        }
        v
    }

    pub fn to_f64_nearest(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(60, Dir::Down);
        scale2(r.mant.to_f64().unwrap_or(f64::NAN), r.exp)
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Some(Self::new(BigInt::from(sign) * BigInt::from(m), ex))
    }

    pub fn max(self, o: Self) -> Self {
        if self >= o {
            self
        } else {
            o
        }
    }

    pub fn min(self, o: Self) -> Self {
        if self <= o {
            self
        } else {
            o
        }
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn ilog2(&self) -> i64 {
        self.msb() - 1
    }
}

fn exact_gt_f64(d: &Dyadic, f: f64) -> bool {
    Dyadic::from_f64(f).map(|x| *d > x).unwrap_or(f == f64::NEG_INFINITY)
}

fn exact_lt_f64(d: &Dyadic, f: f64) -> bool {
    Dyadic::from_f64(f).map(|x| *d < x).unwrap_or(f == f64::INFINITY)
}

fn scale2(mut m: f64, mut e: i64) -> f64 {
    while e > 0 {
        let s = e.min(1000);
        m *= 2f64.powi(s as i32);
        e -= s;
        if !m.is_finite() {
            return m;
        }
    }
    while e < 0 {
        let s = (-e).min(1000);
        m /= 2f64.powi(s as i32);
        e += s;
        if m == 0.0 {
            return m;
        }
    }
    m
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (a, b) = (self.signum(), o.signum());
        if a != b {
            return a.cmp(&b);
        }
        if a == 0 {
            return Ordering::Equal;
        }
        if self.msb() != o.msb() {
            let c = self.msb().cmp(&o.msb());
            return if a > 0 { c } else { c.reverse() };
        }
        self.sub(o).signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64_nearest())
    }
}
