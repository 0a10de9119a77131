//! Real embeddings: Sturm root isolation, interval evaluation, certified signs.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dir, Dyadic};
use crate::error::{Error, Result};
use crate::field::det3;
use crate::scalar::sign_variations;
use crate::{Element, Ival, Rational, Spec};

/// Precision escalation policy for sign decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignConfig {
    pub start_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for SignConfig {
    fn default() -> Self {
        SignConfig { start_bits: 64, max_bits: 4096, escalation_factor: 2 }
    }
}

impl SignConfig {
    pub fn new(start_bits: u32, max_bits: u32, escalation_factor: u32) -> Result<Self> {
        let c = SignConfig { start_bits, max_bits, escalation_factor };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_bits < 32 || self.max_bits < self.start_bits || self.escalation_factor < 2 {
            return Err(Error::InvalidArgument(format!("bad precision policy {:?}", self)));
        }
        Ok(())
    }

    /// The bit levels tried in order.
    pub fn levels(&self) -> Vec<u32> {
        let mut v = vec![];
        let mut b = self.start_bits;
        loop {
            v.push(b.min(self.max_bits));
            if b >= self.max_bits {
                break;
            }
            b = b.saturating_mul(self.escalation_factor);
        }
        v
    }
}

/// Ascending isolating intervals for the three real roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootIntervals {
    pub intervals: [(Rational, Rational); 3],
    pub precision_bits: u32,
}

/// Integer polynomial proportional to the defining one, for exact sign tests.
fn integer_poly(spec: &Spec) -> Vec<BigInt> {
    let l = spec.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    spec.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
}

fn sign_at(p: &[BigInt], x: &Dyadic) -> i32 {
    let mut acc = Dyadic::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(&Dyadic::from_int(c.clone()));
    }
    acc.signum()
}

#[derive(Clone, Debug)]
struct RootState {
    // ascending; f has opposite nonzero signs at the two ends
    brackets: [(Dyadic, Dyadic); 3],
    bits: u32,
}

fn initial_brackets(spec: &Spec) -> Result<[(Dyadic, Dyadic); 3]> {
    let f = spec.rational_poly();
    let ch = f.sturm_chain();
    let lead = f.lead().abs();
    let m = f.coeffs[..3].iter().map(|c| c.abs() / lead.clone()).fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let bound = (m + Rational::one()).ceil().to_integer();
    let e = bound.bits() as i64 + 1;
    let count = |a: &Dyadic, b: &Dyadic| sign_variations(&ch, &a.to_ratio()) - sign_variations(&ch, &b.to_ratio());
    let mut out = Vec::new();
    let mut stack = vec![(Dyadic::pow2(e).neg(), Dyadic::pow2(e))];
    while let Some((a, b)) = stack.pop() {
        let c = count(&a, &b);
        if c == 0 {
            continue;
        }
        if c == 1 {
            out.push((a, b));
            continue;
        }
        let mid = a.add(&b).mul_pow2(-1);
        stack.push((a.clone(), mid.clone()));
        stack.push((mid, b));
    }
    if out.len() != 3 {
        return Err(Error::NotTotallyReal(out.len()));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    let p = integer_poly(spec);
    for (a, b) in &out {
        if sign_at(&p, a) == 0 || sign_at(&p, b) == 0 || sign_at(&p, a) == sign_at(&p, b) {
            return Err(Error::InvalidField("root bracket endpoints are not sign-separating".into()));
        }
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn refine(p: &[BigInt], br: &mut (Dyadic, Dyadic), bits: u32) {
    let target = Dyadic::pow2(-(bits as i64));
    let sa = sign_at(p, &br.0);
    while br.1.sub(&br.0) > target {
        let mid = br.0.add(&br.1).mul_pow2(-1);
        let s = sign_at(p, &mid);
        debug_assert!(s != 0, "rational root of an irreducible cubic");
        if s == sa {
            br.0 = mid;
        } else {
            br.1 = mid;
        }
    }
}

/// Isolating intervals of width at most `2^-bits`.
pub fn isolate_roots(spec: &Spec, bits: u32) -> Result<RootIntervals> {
    let mut br = initial_brackets(spec)?;
    let p = integer_poly(spec);
    for b in br.iter_mut() {
        refine(&p, b, bits);
    }
    Ok(RootIntervals { intervals: br.map(|(a, b)| (a.to_ratio(), b.to_ratio())), precision_bits: bits })
}

/// Enclosures of the three embeddings of an element, in embedding order.
#[derive(Clone, Debug)]
pub struct EmbeddedVector {
    pub enclosures: [Ival; 3],
    pub source: Element,
}

/// Embedding engine for one field with a fixed ordering of the real roots.
#[derive(Debug)]
pub struct Embedding {
    spec: Arc<Spec>,
    order: [usize; 3],
    int_poly: Vec<BigInt>,
    state: Mutex<RootState>,
}

impl Embedding {
    /// `order[i]` is the ascending index of the root used as embedding `i`.
    pub fn new(spec: &Arc<Spec>, order: [usize; 3]) -> Result<Arc<Self>> {
        let mut seen = [false; 3];
        for &o in &order {
            if o > 2 || seen[o] {
                return Err(Error::InvalidArgument(format!("embedding order {:?} is not a permutation", order)));
            }
            seen[o] = true;
        }
        let brackets = initial_brackets(spec)?;
        Ok(Arc::new(Embedding {
            spec: spec.clone(),
            order,
            int_poly: integer_poly(spec),
            state: Mutex::new(RootState { brackets, bits: 0 }),
        }))
    }

    pub fn ascending(spec: &Arc<Spec>) -> Result<Arc<Self>> {
        Self::new(spec, [0, 1, 2])
    }

    pub fn spec(&self) -> &Arc<Spec> {
        &self.spec
    }

    pub fn order(&self) -> [usize; 3] {
        self.order
    }

    /// Parity of the ordering: the sign of the Vandermonde determinant.
    pub fn order_sign(&self) -> i32 {
        let o = self.order;
        let mut inv = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if o[i] > o[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Root enclosures in ascending order, each of width `<= 2^-bits`.
    pub fn roots_ascending(&self, bits: u32) -> [(Dyadic, Dyadic); 3] {
        let mut st = self.state.lock().expect("root cache");
        if st.bits < bits {
            for b in st.brackets.iter_mut() {
                refine(&self.int_poly, b, bits);
            }
            st.bits = bits;
        }
        st.brackets.clone()
    }

    pub fn root_intervals(&self, bits: u32) -> RootIntervals {
        let r = self.roots_ascending(bits);
        RootIntervals { intervals: r.map(|(a, b)| (a.to_ratio(), b.to_ratio())), precision_bits: bits }
    }

    /// Root enclosures in embedding order.
    pub fn roots(&self, bits: u32, prec: u32) -> [Ival; 3] {
        let r = self.roots_ascending(bits);
        self.order.map(|i| Ival::new(r[i].0.round(prec, Dir::Down), r[i].1.round(prec, Dir::Up), prec))
    }

    fn eval_at(&self, x: &Element, roots: &[Ival; 3], prec: u32) -> [Ival; 3] {
        let c = x.coords().clone().map(|q| Ival::from_ratio(&q, prec));
        roots.clone().map(|r| c[2].mul(&r).add(&c[1]).mul(&r).add(&c[0]))
    }

    /// Enclosures of width at most `2^-bits`.
    pub fn embed(&self, x: &Element, bits: u32) -> EmbeddedVector {
        let target = Dyadic::pow2(-(bits as i64));
        let mag: u64 = x.coords().iter().map(|c| c.numer().bits() + c.denom().bits()).max().unwrap_or(0);
        let mut extra = 16 + mag as u32;
        loop {
            let prec = bits + extra + 8;
            let roots = self.roots(bits + extra, prec);
            let enc = self.eval_at(x, &roots, prec);
            let worst = enc.iter().map(|e| e.width()).max().unwrap();
            if worst <= target {
                return EmbeddedVector { enclosures: enc, source: x.clone() };
            }
            let excess = (worst.msb() + bits as i64).max(1) as u32;
            extra += excess + 8;
        }
    }

    /// Enclosures at a working precision, without a width target.
    pub fn embed_at(&self, x: &Element, prec: u32) -> [Ival; 3] {
        let roots = self.roots(prec, prec + 8);
        self.eval_at(x, &roots, prec + 8)
    }

    pub fn is_totally_positive(&self, x: &Element, cfg: &SignConfig) -> Result<bool> {
        if x.is_zero() {
            return Ok(false);
        }
        for bits in cfg.levels() {
            let e = self.embed_at(x, bits);
            if e.iter().any(|v| v.is_neg()) {
                return Ok(false);
            }
            if e.iter().all(|v| v.is_pos()) {
                return Ok(true);
            }
        }
        Err(Error::PrecisionExhausted(cfg.max_bits))
    }

    /// Sign of each embedding, certified.
    pub fn signs(&self, x: &Element, cfg: &SignConfig) -> Result<[i32; 3]> {
        if x.is_zero() {
            return Ok([0; 3]);
        }
        for bits in cfg.levels() {
            let e = self.embed_at(x, bits);
            if let [Some(a), Some(b), Some(c)] = e.clone().map(|v| v.sign().filter(|&s| s != 0)) {
                return Ok([a, b, c]);
            }
        }
        Err(Error::PrecisionExhausted(cfg.max_bits))
    }

    /// Sign of the determinant of the embedding matrix with columns `x1, x2, x3`.
    pub fn sign_det(&self, x1: &Element, x2: &Element, x3: &Element, cfg: &SignConfig) -> Result<i32> {
        if coordinate_det(x1, x2, x3).is_zero() {
            return Ok(0);
        }
        for bits in cfg.levels() {
            let cols = [x1, x2, x3].map(|x| self.embed_at(x, bits));
            let d = interval_det(&cols);
            if let Some(s) = d.sign().filter(|&s| s != 0) {
                return Ok(s);
            }
        }
        Err(Error::PrecisionExhausted(cfg.max_bits))
    }

    /// The sign map on a bracket `[u1|u2]`, i.e. on `(1, u1, u1 u2)`.
    pub fn delta_bracket(&self, u1: &Element, u2: &Element, cfg: &SignConfig) -> Result<i32> {
        let one = Element::one(&self.spec);
        self.sign_det(&one, u1, &(u1 * u2), cfg)
    }

    /// Componentwise logarithm of the embeddings, each of width `<= 2^-bits`.
    pub fn log_embed(&self, x: &Element, bits: u32) -> Result<[Ival; 3]> {
        let mut b = bits + 8;
        let cap = bits.saturating_mul(8).max(8192);
        loop {
            let e = self.embed(x, b).enclosures;
            if e.iter().any(|v| v.is_neg()) || x.is_zero() {
                return Err(Error::NotTotallyPositive(x.to_string()));
            }
            if e.iter().all(|v| v.is_pos()) {
                let logs: Vec<Ival> = e.iter().map(|v| v.clone().with_prec(b + 16).ln().unwrap()).collect();
                let worst = logs.iter().map(|l| l.width()).max().unwrap();
                if worst <= Dyadic::pow2(-(bits as i64)) {
                    return Ok([logs[0].clone(), logs[1].clone(), logs[2].clone()]);
                }
                b += ((worst.msb() + bits as i64).max(1) as u32) + 8;
            } else {
                b *= 2;
            }
            if b > cap {
                return Err(Error::PrecisionExhausted(b));
            }
        }
    }

    /// Embeddings of `x` divided by the real cube root of its norm.
    pub fn project_h(&self, x: &Element, bits: u32) -> Result<[Ival; 3]> {
        let n = x.norm();
        if !n.is_positive() {
            return Err(Error::NotTotallyPositive(x.to_string()));
        }
        let prec = bits + 32;
        let e = self.embed(x, prec).enclosures;
        if !e.iter().all(|v| v.is_pos()) {
            return Err(Error::NotTotallyPositive(x.to_string()));
        }
        let c = Ival::root_ratio(&n, 3, prec + 32).recip().expect("positive cube root");
        Ok(e.map(|v| v.with_prec(prec + 32).mul(&c)))
    }

    /// `Log(x_H)`: logarithms with the mean removed, so the trace vanishes.
    pub fn log_h(&self, x: &Element, bits: u32) -> Result<[Ival; 3]> {
        let l = self.log_embed(x, bits + 4)?;
        let n = x.norm();
        let nl = Ival::from_ratio(&n, bits + 40).ln().ok_or_else(|| Error::NotTotallyPositive(x.to_string()))?;
        let third = nl.div(&Ival::from_i64(3, bits + 40)).unwrap();
        Ok(l.map(|v| v.sub(&third)))
    }
}

/// Determinant of the power-basis coordinate matrix (rows are elements).
pub fn coordinate_det(x1: &Element, x2: &Element, x3: &Element) -> Rational {
    det3(&[x1.coords().clone(), x2.coords().clone(), x3.coords().clone()])
}

pub fn interval_det(cols: &[[Ival; 3]; 3]) -> Ival {
    // cols[j][i] = sigma_i(x_j)
    let m = |i: usize, j: usize| &cols[j][i];
    let t = |a: usize, b: usize, c: usize| m(0, a).mul(m(1, b)).mul(m(2, c));
    t(0, 1, 2).add(&t(1, 2, 0)).add(&t(2, 0, 1)).sub(&t(2, 1, 0)).sub(&t(0, 2, 1)).sub(&t(1, 0, 2))
}

/// `M` in slot `i` and `-M/2` elsewhere.
pub fn l_point(i: usize, m: &Rational) -> [Rational; 3] {
    let h = -m / Rational::from_integer(2.into());
    let mut v = [h.clone(), h.clone(), h];
    v[i] = m.clone();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::rat;

    #[test]
    fn roots_of_example_field() {
        let s = FieldSpec::new([rat(1), rat(-1), rat(-4), rat(2)]).unwrap();
        let r = isolate_roots(&s, 60).unwrap();
        let mids: Vec<f64> = r.intervals.iter().map(|(a, b)| {
            use num_traits::ToPrimitive;
            ((a + b) / rat(2)).to_f64().unwrap()
        }).collect();
        assert!((mids[0] + 0.5513875).abs() < 1e-6);
        assert!((mids[1] - 0.4268172).abs() < 1e-6);
        assert!((mids[2] - 2.1245702).abs() < 1e-6);
    }

    #[test]
    fn levels_escalate() {
        assert_eq!(SignConfig::default().levels(), vec![64, 128, 256, 512, 1024, 2048, 4096]);
        assert!(SignConfig::new(16, 64, 2).is_err());
    }

    #[test]
    fn l_point_shape() {
        assert_eq!(l_point(0, &rat(2)), [rat(2), rat(-1), rat(-1)]);
    }
}
