//! The logarithmic plane: coordinates of `Log(x_H)` in a basis of two
//! unit logarithms, images of straight segments, and their slopes.

use std::sync::Arc;

use serde::Serialize;

use crate::embed::{Embedding, SignConfig};
use crate::error::{Error, Result};
use crate::geom::{Cone, ShintaniSet};
use crate::{Element, Ival, Rational};

/// A point of the plane, as two enclosures.
#[derive(Clone, Debug)]
pub struct PlanePoint {
    pub x: Ival,
    pub y: Ival,
}

impl PlanePoint {
    pub fn exact(x: i64, y: i64, prec: u32) -> Self {
        PlanePoint { x: Ival::from_i64(x, prec), y: Ival::from_i64(y, prec) }
    }

    pub fn x_f64(&self) -> f64 {
        self.x.mid_f64()
    }

    pub fn y_f64(&self) -> f64 {
        self.y.mid_f64()
    }

    /// Upper bound on the distance (sup norm) from the midpoint to the true point.
    pub fn err(&self) -> f64 {
        self.x.radius_f64().max(self.y.radius_f64())
    }

    pub fn add(&self, o: &PlanePoint) -> PlanePoint {
        PlanePoint { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &PlanePoint) -> PlanePoint {
        PlanePoint { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn translate(&self, a: i64, b: i64) -> PlanePoint {
        let p = self.x.prec;
        self.add(&PlanePoint::exact(a, b, p))
    }

    pub fn encloses(&self, a: &Rational, b: &Rational) -> bool {
        self.x.contains_ratio(a) && self.y.contains_ratio(b)
    }

    /// Whether both enclosures overlap those of `o`.
    pub fn meets(&self, o: &PlanePoint) -> bool {
        self.x.intersects(&o.x) && self.y.intersects(&o.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CurveId {
    /// Image of the segment from `1` to `g_i^l`, shifted by a lattice vector.
    Unit { i: u8, l: i64, translate: (i64, i64) },
    /// Image of an edge between two generators of a named set.
    Edge { set: String, index: usize },
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveId::Unit { i, l, translate } => write!(f, "C{}_l{}_{}_{}", i, l, translate.0, translate.1),
            CurveId::Edge { set, index } => write!(f, "{}_e{}", set, index),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CurveSample {
    pub id: CurveId,
    /// parameter values, strictly increasing in `[0, 1]`
    pub t: Vec<f64>,
    pub points: Vec<PlanePoint>,
}

impl CurveSample {
    /// Side of the endpoint chord on which every interior sample lies:
    /// `1` for the left, `-1` for the right, `None` if undecided or mixed.
    pub fn chord_side(&self) -> Option<i32> {
        let n = self.points.len();
        if n < 3 {
            return None;
        }
        let p0 = &self.points[0];
        let d = self.points[n - 1].sub(p0);
        let mut side = None;
        for p in &self.points[1..n - 1] {
            let v = p.sub(p0);
            let c = d.x.mul(&v.y).sub(&d.y.mul(&v.x));
            let s = c.sign().filter(|&s| s != 0)?;
            match side {
                None => side = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
        side
    }
}

/// Outcome of the two inequality chains on the basis units.
#[derive(Clone, Debug, Serialize)]
pub struct FixgiReport {
    /// `g1(2) > g1(1)^-2 > g1(1)^-1 > 1`
    pub chain1: bool,
    /// `g2(1) < g2(2) < 1`
    pub chain2: bool,
    pub bits_used: u32,
}

impl FixgiReport {
    pub fn pass(&self) -> bool {
        self.chain1 && self.chain2
    }
}

// Some(true) / Some(false) when `a < b` is certain either way
fn strict_lt(a: &Ival, b: &Ival) -> Option<bool> {
    if a.lt(b) {
        Some(true)
    } else if b.hi <= a.lo {
        Some(false)
    } else {
        None
    }
}

/// Evaluate both chains with escalating precision.
pub fn check_fixgi(emb: &Embedding, g1: &Element, g2: &Element, cfg: &SignConfig) -> Result<FixgiReport> {
    for bits in cfg.levels() {
        let a = emb.embed_at(g1, bits);
        let b = emb.embed_at(g2, bits);
        if !a.iter().chain(b.iter()).all(|v| v.is_pos()) {
            if a.iter().chain(b.iter()).any(|v| v.is_neg()) {
                return Err(Error::NotTotallyPositive(format!("{} or {}", g1, g2)));
            }
            continue;
        }
        let one = Ival::one(bits);
        let inv1 = a[0].recip().expect("positive");
        let inv2 = inv1.sqr();
        let c1 = [strict_lt(&inv2, &a[1]), strict_lt(&inv1, &inv2), strict_lt(&one, &inv1)];
        let c2 = [strict_lt(&b[0], &b[1]), strict_lt(&b[1], &one)];
        let fold = |c: &[Option<bool>]| -> Option<bool> {
            if c.contains(&Some(false)) {
                Some(false)
            } else if c.iter().all(|x| *x == Some(true)) {
                Some(true)
            } else {
                None
            }
        };
        if let (Some(chain1), Some(chain2)) = (fold(&c1), fold(&c2)) {
            return Ok(FixgiReport { chain1, chain2, bits_used: bits });
        }
    }
    Err(Error::Inconclusive("fixgi chains undecided at the precision cap".into()))
}

/// Slopes at the ends of the curves, bounds on them, and their limits.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    pub l: i64,
    pub pass: bool,
    /// smallest certified margin over all sampled inequalities
    pub min_margin: f64,
    pub failures: Vec<String>,
}

/// Plane coordinates with respect to a basis `{Log g1, Log g2}`.
#[derive(Clone, Debug)]
pub struct PlaneBasis {
    emb: Arc<Embedding>,
    g: [Element; 2],
    logs: [[Ival; 3]; 2],
    det: Ival,
    bits: u32,
}

impl PlaneBasis {
    pub fn new(emb: &Arc<Embedding>, g1: &Element, g2: &Element, bits: u32) -> Result<Self> {
        let mut b = bits;
        loop {
            let a = emb.log_h(g1, b + 8)?;
            let c = emb.log_h(g2, b + 8)?;
            let det = a[0].mul(&c[1]).sub(&a[1].mul(&c[0]));
            if !det.contains_zero() {
                return Ok(PlaneBasis { emb: emb.clone(), g: [g1.clone(), g2.clone()], logs: [a, c], det, bits });
            }
            if det.width() < crate::dyadic::Dyadic::pow2(-(2 * bits as i64)) && b >= 4 * bits {
                return Err(Error::DegenerateBasis);
            }
            b *= 2;
        }
    }

    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.emb
    }

    pub fn units(&self) -> &[Element; 2] {
        &self.g
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        PlaneBasis::new(&self.emb, &self.g[0], &self.g[1], bits)
    }

    /// Coordinates of a vector of `H`, read off its first two components.
    fn coords(&self, h: &[Ival; 3]) -> PlanePoint {
        let [a, b] = &self.logs;
        let x = h[0].mul(&b[1]).sub(&h[1].mul(&b[0])).div(&self.det).expect("nonzero");
        let y = a[0].mul(&h[1]).sub(&a[1].mul(&h[0])).div(&self.det).expect("nonzero");
        PlanePoint { x, y }
    }

    pub fn phi(&self, x: &Element) -> Result<PlanePoint> {
        let h = self.emb.log_h(x, self.bits + 8)?;
        Ok(self.coords(&h))
    }

    /// The same map on a vector of positive reals.
    pub fn phi_real(&self, v: &[Ival; 3]) -> Result<PlanePoint> {
        let prec = self.bits + 24;
        let mut l = vec![];
        for c in v {
            l.push(c.clone().with_prec(prec).ln().ok_or_else(|| Error::NotTotallyPositive("real vector".into()))?);
        }
        let mean = l[0].add(&l[1]).add(&l[2]).div(&Ival::from_i64(3, prec)).expect("three");
        let h = [l[0].sub(&mean), l[1].sub(&mean), l[2].sub(&mean)];
        Ok(self.coords(&h))
    }

    fn unit_powers(&self, i: u8, s: i64) -> Result<[Ival; 3]> {
        let g = self.unit(i)?;
        let e = self.emb.embed(g, self.bits + 32).enclosures;
        let mut out = vec![];
        for v in e {
            out.push(v.with_prec(self.bits + 32).powi(s).ok_or_else(|| Error::NotTotallyPositive(g.to_string()))?);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    }

    fn unit(&self, i: u8) -> Result<&Element> {
        match i {
            1 => Ok(&self.g[0]),
            2 => Ok(&self.g[1]),
            _ => Err(Error::InvalidArgument(format!("curve index {} is not 1 or 2", i))),
        }
    }

    /// Point of the image of the segment from `(1,1,1)` to `g_i^l` at `t`.
    pub fn curve_point(&self, i: u8, l: i64, t: &Rational) -> Result<PlanePoint> {
        let c = self.unit_powers(i, l)?;
        self.curve_point_with(&c, t)
    }

    fn curve_point_with(&self, c: &[Ival; 3], t: &Rational) -> Result<PlanePoint> {
        let prec = self.bits + 32;
        let ti = Ival::from_ratio(t, prec);
        let one = Ival::one(prec);
        let v = c.clone().map(|cj| one.add(&ti.mul(&cj.sub(&one))));
        self.phi_real(&v)
    }

    /// Uniform samples of the curve for `(i, l)`, endpoints pinned to the lattice.
    pub fn curve_sample(&self, i: u8, l: i64, n_points: usize, translate: (i64, i64)) -> Result<CurveSample> {
        if l < 1 || n_points < 2 {
            return Err(Error::InvalidArgument(format!("curve needs l >= 1 and two points, got l = {}, n = {}", l, n_points)));
        }
        let c = self.unit_powers(i, l)?;
        let prec = self.bits;
        let end = if i == 1 { (l, 0) } else { (0, l) };
        let mut t = Vec::with_capacity(n_points);
        let mut points = Vec::with_capacity(n_points);
        let m = (n_points - 1) as i64;
        for k in 0..=m {
            let p = if k == 0 {
                PlanePoint::exact(0, 0, prec)
            } else if k == m {
                PlanePoint::exact(end.0, end.1, prec)
            } else {
                self.curve_point_with(&c, &crate::ratio(k, m))?
            };
            t.push(k as f64 / m as f64);
            points.push(p.translate(translate.0, translate.1));
        }
        Ok(CurveSample { id: CurveId::Unit { i, l, translate }, t, points })
    }

    /// Image of the segment between the rays of `a` and `b`.
    pub fn segment_sample(&self, a: &Element, b: &Element, n_points: usize, id: CurveId) -> Result<CurveSample> {
        let prec = self.bits + 32;
        let ea = self.emb.embed(a, prec).enclosures.map(|v| v.with_prec(prec));
        let eb = self.emb.embed(b, prec).enclosures.map(|v| v.with_prec(prec));
        let m = (n_points.max(2) - 1) as i64;
        let mut t = vec![];
        let mut points = vec![];
        for k in 0..=m {
            let s = Ival::from_ratio(&crate::ratio(k, m), prec);
            let r = Ival::one(prec).sub(&s);
            let v: [Ival; 3] = std::array::from_fn(|j| r.mul(&ea[j]).add(&s.mul(&eb[j])));
            t.push(k as f64 / m as f64);
            points.push(self.phi_real(&v)?);
        }
        Ok(CurveSample { id, t, points })
    }

    /// Curves bounding the image of a set: one per edge of its cells, shared
    /// edges once, plus the images of its one-dimensional cells.
    pub fn set_outline(&self, name: &str, s: &ShintaniSet, n_points: usize) -> Result<(Vec<CurveSample>, Vec<PlanePoint>)> {
        let spec = self.emb.spec().clone();
        let mut edges: Vec<Cone> = vec![];
        let mut rays: Vec<Cone> = vec![];
        for c in s.cells() {
            match c.dim() {
                1 => rays.push(c.clone()),
                2 => edges.push(c.clone()),
                _ => {
                    for mask in [3u8, 5, 6] {
                        edges.push(c.face(mask));
                    }
                }
            }
        }
        edges.sort_by(|a, b| a.rays().cmp(b.rays()));
        edges.dedup();
        let mut curves = vec![];
        for (index, e) in edges.iter().enumerate() {
            let g = e.generators(&spec);
            curves.push(self.segment_sample(&g[0], &g[1], n_points, CurveId::Edge { set: name.to_string(), index })?);
        }
        let mut marks = vec![];
        for r in rays {
            marks.push(self.phi(&r.generators(&spec)[0])?);
        }
        Ok((curves, marks))
    }

    /// `dy/dx` at `t = 0` or `t = 1` for the curve `(i, l)`, in closed form.
    pub fn endpoint_derivative(&self, i: u8, l: i64, t: u8) -> Result<Ival> {
        let s = match t {
            0 => l,
            1 => -l,
            _ => return Err(Error::InvalidArgument(format!("endpoint {} is not 0 or 1", t))),
        };
        let c = self.unit_powers(i, s)?;
        let two = Ival::from_i64(2, self.bits + 32);
        let a = two.mul(&c[1]).sub(&c[0]).sub(&c[2]);
        let b = two.mul(&c[0]).sub(&c[1]).sub(&c[2]);
        let [la, lb] = &self.logs;
        let num = a.mul(&la[0]).sub(&b.mul(&la[1]));
        let den = a.mul(&lb[0]).sub(&b.mul(&lb[1]));
        num.div(&den).map(|q| q.neg()).ok_or(Error::DegenerateBasis)
    }

    /// Limit of the endpoint slope as `l` grows; the sign is asserted.
    pub fn limit_derivative(&self, i: u8, t: u8, cfg: &SignConfig) -> Result<Ival> {
        let f = check_fixgi(&self.emb, &self.g[0], &self.g[1], cfg)?;
        if !f.chain1 {
            return Err(Error::FixgiViolated(1));
        }
        if !f.chain2 {
            return Err(Error::FixgiViolated(2));
        }
        let [a, b] = &self.logs;
        let p = self.bits + 32;
        let k = |x: i64| Ival::from_i64(x, p);
        // coefficients on the first and second logarithms, and the expected sign
        let (u, v, sign) = match (i, t) {
            (1, 0) => (2, 1, 1),
            (1, 1) | (2, 0) => (-1, 1, -1),
            (2, 1) => (1, 2, 1),
            _ => return Err(Error::InvalidArgument(format!("no limit for ({}, {})", i, t))),
        };
        let num = k(u).mul(&a[0]).add(&k(v).mul(&a[1]));
        let den = k(u).mul(&b[0]).add(&k(v).mul(&b[1]));
        let q = num.div(&den).ok_or(Error::DegenerateBasis)?.neg();
        match q.sign() {
            Some(s) if s == sign => Ok(q),
            Some(_) => Err(Error::SignConditionFailed(format!("limit slope ({}, {})", i, t))),
            None => Err(Error::Inconclusive(format!("limit slope ({}, {}) straddles 0", i, t))),
        }
    }

    /// The four sampled side conditions on the curves for `l`, on interior
    /// grid points; ends lie on the lattice and are not tested.
    pub fn check_direction_bounds(&self, l: i64, n_points: usize, cfg: &SignConfig) -> Result<DirectionReport> {
        let mut levels: Vec<u32> = cfg.levels().into_iter().filter(|&b| b > self.bits).collect();
        levels.insert(0, self.bits);
        'level: for bits in levels {
            let basis = if bits == self.bits { self.clone() } else { self.with_bits(bits)? };
            let c1 = basis.curve_sample(1, l, n_points, (0, 0))?;
            let c2 = basis.curve_sample(2, l, n_points, (0, 0))?;
            let lv = Ival::from_i64(l, bits);
            let mut min_margin = f64::INFINITY;
            let mut failures = vec![];
            let n = c1.points.len();
            for k in 1..n - 1 {
                let (p, q) = (&c1.points[k], &c2.points[k]);
                let checks = [
                    ("y1 >= 0", p.y.clone()),
                    ("x2 <= 0", q.x.neg()),
                    ("x1 >= 0", p.x.clone()),
                    ("x1 <= l", lv.sub(&p.x)),
                    ("y2 >= 0", q.y.clone()),
                    ("y2 <= l", lv.sub(&q.y)),
                ];
                for (name, v) in checks {
                    if v.hi.signum() < 0 {
                        failures.push(format!("{} at t = {}", name, c1.t[k]));
                        min_margin = min_margin.min(v.mid_f64());
                    } else if v.lo.signum() >= 0 {
                        min_margin = min_margin.min(v.lo.to_f64_nearest());
                    } else {
                        continue 'level;
                    }
                }
            }
            return Ok(DirectionReport { l, pass: failures.is_empty(), min_margin, failures });
        }
        Err(Error::Inconclusive(format!("direction bounds for l = {} undecided at the precision cap", l)))
    }
}
