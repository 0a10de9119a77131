//! Windowed searches over unit translates: supports, covers, tiling checks,
//! and the set identities between translated domains.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cone::{element_of, ray_of, ShintaniSet};
use super::polygon::{Constraint, IVec};
use super::Geometry;
use crate::error::{Error, Result};
use crate::{Element, Fval, Ival, Rational};

/// Minimal box `[0, alpha1] x [0, alpha2]` of translates covering a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverBox {
    pub alpha: (i64, i64),
    pub base_units: (Element, Element),
    pub support: Vec<(i64, i64)>,
}

/// Integer power cache for a pair of units.
pub(crate) struct UnitPowers {
    u1: Element,
    u2: Element,
    cache: HashMap<(i64, i64), Element>,
}

impl UnitPowers {
    pub(crate) fn new(u1: &Element, u2: &Element) -> Self {
        UnitPowers { u1: u1.clone(), u2: u2.clone(), cache: HashMap::new() }
    }

    pub(crate) fn get(&mut self, k1: i64, k2: i64) -> Result<Element> {
        if let Some(x) = self.cache.get(&(k1, k2)) {
            return Ok(x.clone());
        }
        let x = &self.u1.pow(k1)? * &self.u2.pow(k2)?;
        self.cache.insert((k1, k2), x.clone());
        Ok(x)
    }
}

impl Geometry {
    /// All `(k1, k2)` in the window with `u1^k1 u2^k2 D` meeting `pi^-1 D`.
    pub fn error_support(&self, d: &ShintaniSet, pi: &Element, u1: &Element, u2: &Element, window: i64) -> Result<Vec<(i64, i64)>> {
        let target = self.scale(d, &pi.inv()?)?;
        let mut pw = UnitPowers::new(u1, u2);
        let mut out = vec![];
        for k1 in -window..=window {
            for k2 in -window..=window {
                let t = d.scale_unchecked(&pw.get(k1, k2)?);
                if t.meets(&target) {
                    if k1.abs() == window || k2.abs() == window {
                        return Err(Error::WindowExceeded(k1, k2));
                    }
                    out.push((k1, k2));
                }
            }
        }
        Ok(out)
    }

    /// Minimal box of nonnegative translates of `D` covering `x^-1 D`,
    /// with the containment verified exactly.
    pub fn translation_cover(&self, d: &ShintaniSet, x: &Element, u1: &Element, u2: &Element, window: i64) -> Result<CoverBox> {
        let support = self.error_support(d, x, u1, u2, window)?;
        if let Some(&(a, b)) = support.iter().find(|&&(a, b)| a < 0 || b < 0) {
            return Err(Error::InclusionViolated(format!("translate ({}, {}) has a negative exponent", a, b)));
        }
        let a1 = support.iter().map(|p| p.0).max().unwrap_or(0);
        let a2 = support.iter().map(|p| p.1).max().unwrap_or(0);
        let mut pw = UnitPowers::new(u1, u2);
        let mut parts = vec![];
        for i in 0..=a1 {
            for j in 0..=a2 {
                parts.push(d.scale_unchecked(&pw.get(i, j)?));
            }
        }
        let cover = ShintaniSet::union_all(parts.iter());
        let target = self.scale(d, &x.inv()?)?;
        if let Some(w) = target.difference_witness(&cover) {
            return Err(Error::InclusionViolated(format!("point {} is not covered", element_of(self.spec(), &w))));
        }
        Ok(CoverBox { alpha: (a1, a2), base_units: (u1.clone(), u2.clone()), support })
    }
}

/// One sampled point and the translates of the domain containing it.
#[derive(Clone, Debug, Serialize)]
pub struct FdHit {
    pub point: Vec<String>,
    pub hits: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdReport {
    pub samples: usize,
    pub window: i64,
    pub seed: u64,
    /// number of hits -> number of samples with that many hits
    pub histogram: BTreeMap<usize, usize>,
    pub boundary_hits: usize,
    pub exact_fallbacks: usize,
    pub pass: bool,
    pub witness: Option<FdHit>,
}

// one open cell of a translate: exact normals in the coordinates of the
// sample, plus the same forms evaluated through the embeddings
struct TranslatedCell {
    exact: Vec<Constraint>,
    fast: Vec<[Fval; 3]>,
}

impl Geometry {
    fn embedding_inverse(&self, prec: u32) -> [[Ival; 3]; 3] {
        // W[i][k] = sigma_i(y^k)
        let y = Element::gen(self.spec());
        let ys = [Element::one(self.spec()), y.clone(), &y * &y];
        let cols: Vec<[Ival; 3]> = ys.iter().map(|e| self.embedding().embed_at(e, prec)).collect();
        let w: [[Ival; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|k| cols[k][i].clone()));
        inverse3(&w)
    }

    // constraints of u D rewritten as conditions on x: n.coords(u^-1 x) = (M^T n).coords(x)
    fn translated_cells(&self, d: &ShintaniSet, u: &Element, winv: &[[Ival; 3]; 3]) -> Result<Vec<TranslatedCell>> {
        let uinv = u.inv()?;
        let m = uinv.mul_matrix();
        let prec = winv[0][0].prec;
        let su = self.embedding().embed_at(&uinv, prec);
        let mut out = vec![];
        for c in d.cells() {
            let mut exact = vec![];
            let mut fast = vec![];
            for k in c.constraints() {
                let n = k.normal();
                let t: [Rational; 3] = std::array::from_fn(|j| {
                    (0..3).fold(Rational::zero(), |acc, i| acc + &m[i][j] * Rational::from_integer(n[i].clone()))
                });
                let den = t.iter().fold(BigInt::from(1), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
                let dr = Rational::from_integer(den);
                let tn: IVec = std::array::from_fn(|j| (&t[j] * &dr).to_integer());
                exact.push(match k {
                    Constraint::Pos(_) => Constraint::Pos(tn),
                    Constraint::Zero(_) => Constraint::Zero(tn),
                });
                let beta = std::array::from_fn(|i| {
                    let mut acc = Ival::zero(prec);
                    for j in 0..3 {
                        let nj = Ival::from_ratio(&Rational::from_integer(n[j].clone()), prec);
                        acc = acc.add(&nj.mul(&winv[j][i]));
                    }
                    acc.mul(&su[i]).to_f64_interval()
                });
                fast.push(beta);
            }
            out.push(TranslatedCell { exact, fast });
        }
        Ok(out)
    }

    // a totally positive point with embeddings spread over [1, 2^8), in a
    // region fixed independently of the domain under test
    fn random_base_point(&self, rng: &mut ChaCha8Rng, winv: &[[f64; 3]; 3]) -> Result<Element> {
        let scale = (1u64 << 32) as f64;
        loop {
            let r: [f64; 3] = std::array::from_fn(|_| (rng.gen::<f64>() * 8.0).exp2());
            let coords: [Rational; 3] = std::array::from_fn(|k| {
                let v = (0..3).map(|i| winv[k][i] * r[i]).sum::<f64>();
                Rational::new(BigInt::from((v * scale).round() as i64), BigInt::from(1u64 << 32))
            });
            let x = Element::new(self.spec(), coords);
            if !x.is_zero() && self.embedding().is_totally_positive(&x, self.sign_config())? {
                return Ok(x);
            }
        }
    }

    /// Sampled tiling test: every random point should lie in exactly one
    /// translate `u1^k1 u2^k2 D` with `k` inside the window. Points are unit
    /// translates (exponents in `[-2, 2]`) of random points with bounded
    /// embedding ratios.
    pub fn fundamental_domain_check(&self, d: &ShintaniSet, u1: &Element, u2: &Element, samples: usize, window: i64, seed: u64) -> Result<FdReport> {
        let winv = self.embedding_inverse(192);
        let winv_f: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| winv[i][j].mid_f64()));
        let mut pw = UnitPowers::new(u1, u2);
        let mut translates: Vec<((i64, i64), Vec<TranslatedCell>)> = vec![];
        for k1 in -window..=window {
            for k2 in -window..=window {
                translates.push(((k1, k2), self.translated_cells(d, &pw.get(k1, k2)?, &winv)?));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut histogram = BTreeMap::new();
        let mut boundary_hits = 0;
        let mut exact_fallbacks = 0;
        let mut witness: Option<FdHit> = None;
        for _ in 0..samples {
            let z = self.random_base_point(&mut rng, &winv_f)?;
            let (a, b) = (rng.gen_range(-2..=2i64), rng.gen_range(-2..=2i64));
            let xe = &pw.get(a, b)? * &z;
            let x = ray_of(&xe);
            let sx: [Fval; 3] = self.embedding().embed_at(&xe, 64).map(|v| v.to_f64_interval());
            let mut hits = vec![];
            for (k, cells) in &translates {
                let inside = cells.iter().any(|cell| {
                    cell.exact.iter().zip(&cell.fast).all(|(c, f)| {
                        let t = f[0].mul(&sx[0]).add(&f[1].mul(&sx[1])).add(&f[2].mul(&sx[2]));
                        let fast = if t.lo.is_finite() && t.hi.is_finite() { t.sign() } else { None };
                        match (c, fast) {
                            (Constraint::Pos(_), Some(s)) if s != 0 => s > 0,
                            (Constraint::Zero(_), Some(s)) if s != 0 => false,
                            _ => {
                                exact_fallbacks += 1;
                                c.holds(&x)
                            }
                        }
                    })
                });
                if inside {
                    hits.push(*k);
                }
            }
            let on_boundary = hits.iter().any(|&(a, b)| a.abs() == window || b.abs() == window);
            if on_boundary {
                boundary_hits += 1;
            }
            *histogram.entry(hits.len()).or_insert(0) += 1;
            if (hits.len() != 1 || on_boundary) && witness.is_none() {
                witness = Some(FdHit { point: xe.coords().iter().map(|c| c.to_string()).collect(), hits: hits.clone() });
            }
        }
        let pass = witness.is_none();
        Ok(FdReport { samples, window, seed, histogram, boundary_hits, exact_fallbacks, pass, witness })
    }
}

fn inverse3(m: &[[Ival; 3]; 3]) -> [[Ival; 3]; 3] {
    let c = |i: usize, j: usize| {
        // cofactor of entry (i, j)
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let s: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let minor = m[r[0]][s[0]].mul(&m[r[1]][s[1]]).sub(&m[r[0]][s[1]].mul(&m[r[1]][s[0]]));
        if (i + j).is_multiple_of(2) {
            minor
        } else {
            minor.neg()
        }
    };
    let det = m[0][0].mul(&c(0, 0)).add(&m[0][1].mul(&c(0, 1))).add(&m[0][2].mul(&c(0, 2)));
    std::array::from_fn(|i| std::array::from_fn(|j| c(j, i).div(&det).expect("invertible embedding matrix")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IdentityCase {
    Case1,
    Case2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    Id1,
    Id2,
    Case2Extra,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub holds: bool,
    pub lhs: ShintaniSet,
    pub rhs: ShintaniSet,
    /// a point in exactly one side
    pub witness: Option<Element>,
    /// the explicit four-cell form, for the Case 2 extra identity
    pub expected_form: Option<bool>,
}

impl Geometry {
    /// Both sides of a translated-domain identity, built from scratch and compared.
    pub fn verify_identity(&self, case: IdentityCase, which: Identity, e1: &Element, e2: &Element, pi: &Element) -> Result<IdentityReport> {
        let b = self.explicit_b(e1, e2)?;
        let pinv = pi.inv()?;
        let pib = b.scale_unchecked(&pinv);
        let mut pw = UnitPowers::new(e1, e2);
        // u^-k (u^k B  n  pi^-1 B)
        let mut back = |k1: i64, k2: i64| -> Result<ShintaniSet> {
            let u = pw.get(k1, k2)?;
            let uinv = pw.get(-k1, -k2)?;
            Ok(b.scale_unchecked(&u).intersect(&pib).scale_unchecked(&uinv))
        };
        let (lhs, rhs, expected) = match which {
            Identity::Id1 => {
                let pb1 = self.explicit_b1(e2, pi)?.scale_unchecked(&pinv);
                let l = pb1.intersect(&b).union(&pb1.intersect(&b.scale_unchecked(e2)).scale_unchecked(&e2.inv()?));
                let ks: &[i64] = if case == IdentityCase::Case1 { &[0, 1] } else { &[0, 1, 2] };
                let mut parts = vec![];
                for &k2 in ks {
                    parts.push(back(1, k2)?);
                }
                (l, ShintaniSet::union_all(parts.iter()), None)
            }
            Identity::Id2 => {
                let pb2 = self.explicit_b2(e1, pi)?.scale_unchecked(&pinv);
                let l = pb2.intersect(&b).union(&pb2.intersect(&b.scale_unchecked(e1)).scale_unchecked(&e1.inv()?));
                let ks: &[i64] = if case == IdentityCase::Case1 { &[1] } else { &[1, 2] };
                let mut parts = vec![];
                for k1 in 0..=1 {
                    for &k2 in ks {
                        parts.push(back(k1, k2)?);
                    }
                }
                (l, ShintaniSet::union_all(parts.iter()), None)
            }
            Identity::Case2Extra => {
                if case != IdentityCase::Case2 {
                    return Err(Error::InvalidArgument("the extra identity belongs to Case 2".into()));
                }
                let pb2 = self.explicit_b2(e1, pi)?.scale_unchecked(&pinv);
                let e12 = e1 * e2;
                let upper = b.scale_unchecked(e2).union(&b.scale_unchecked(&e12));
                let l = upper.intersect(&pb2);
                let shifted = b.scale_unchecked(&(&e12 * e2)).union(&b.scale_unchecked(&(e2 * e2)));
                let r = shifted.intersect(&pib).scale_unchecked(&e2.inv()?);
                (l, r, Some(self.case2_form(e1, e2, &pinv)?))
            }
        };
        let (eq, w) = lhs.set_equal(&rhs);
        let expected_form = expected.map(|form| lhs.set_equal(&form).0);
        Ok(IdentityReport { holds: eq, witness: w.map(|v| element_of(self.spec(), &v)), lhs, rhs, expected_form })
    }

    // C(e12) u C(a, e12) u C(e12, b) u C(a, e12, b) with a, b the crossings of
    // the edge (pi^-1, e1 pi^-1) with the edges (e2, e12) and (e12, e1 e12)
    fn case2_form(&self, e1: &Element, e2: &Element, pinv: &Element) -> Result<ShintaniSet> {
        let e12 = e1 * e2;
        let edge = self.cone(&[pinv.clone(), e1 * pinv])?;
        let alpha = self.sample_in_intersection(&edge, &self.cone(&[e2.clone(), e12.clone()])?)?;
        let beta = self.sample_in_intersection(&edge, &self.cone(&[e12.clone(), e1 * &e12])?)?;
        Ok(ShintaniSet::from_cells(vec![
            self.cone(std::slice::from_ref(&e12))?,
            self.cone(&[alpha.clone(), e12.clone()])?,
            self.cone(&[e12.clone(), beta.clone()])?,
            self.cone(&[alpha, e12, beta])?,
        ]))
    }
}
