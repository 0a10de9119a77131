//! The construction of a good pair of units and a normalised `pi`: lattice
//! searches in log space, the sign and inequality checks, the power, the
//! triangle search and the case split.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::embed::SignConfig;
use crate::error::{Error, Result};
use crate::geom::{CoverBox, Geometry, ShintaniSet};
use crate::plane::{PlaneBasis, PlanePoint};
use crate::{Element, Ival, Rational};

pub use crate::plane::{check_fixgi, FixgiReport};

/// Logarithms of a rank-two group of units, or of a coset `offset * group`.
#[derive(Clone, Debug)]
pub struct LogLattice {
    pub basis: (Element, Element),
    pub offset: Option<Element>,
    logs: [[Ival; 3]; 2],
    offset_log: Option<[Ival; 3]>,
    /// Gram matrix of the two basis logarithms
    pub gram: [[Ival; 2]; 2],
    bits: u32,
}

#[derive(Clone, Debug)]
pub struct LatticePoint {
    pub k: (i64, i64),
    pub element: Element,
}

#[derive(Clone, Debug, Default)]
pub struct BallPoints {
    pub inside: Vec<LatticePoint>,
    /// enclosure still straddles the sphere at the precision cap
    pub undecided: Vec<LatticePoint>,
}

fn dot3(a: &[Ival; 3], b: &[Ival; 3]) -> Ival {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

impl LogLattice {
    pub fn new(geo: &Geometry, u1: &Element, u2: &Element, offset: Option<&Element>, bits: u32) -> Result<Self> {
        let emb = geo.embedding();
        let logs = [emb.log_h(u1, bits)?, emb.log_h(u2, bits)?];
        let offset_log = match offset {
            Some(o) => Some(emb.log_h(o, bits)?),
            None => None,
        };
        let gram = [
            [dot3(&logs[0], &logs[0]), dot3(&logs[0], &logs[1])],
            [dot3(&logs[1], &logs[0]), dot3(&logs[1], &logs[1])],
        ];
        let det = gram[0][0].mul(&gram[1][1]).sub(&gram[0][1].mul(&gram[1][0]));
        if det.contains_zero() {
            return Err(Error::DegenerateBasis);
        }
        Ok(LogLattice { basis: (u1.clone(), u2.clone()), offset: offset.cloned(), logs, offset_log, gram, bits })
    }

    fn log_of(&self, k: (i64, i64)) -> [Ival; 3] {
        let p = self.logs[0][0].prec;
        let (a, b) = (Ival::from_i64(k.0, p), Ival::from_i64(k.1, p));
        std::array::from_fn(|j| {
            let v = a.mul(&self.logs[0][j]).add(&b.mul(&self.logs[1][j]));
            match &self.offset_log {
                Some(o) => v.add(&o[j]),
                None => v,
            }
        })
    }

    fn element_of(&self, k: (i64, i64)) -> Result<Element> {
        let u = &self.basis.0.pow(k.0)? * &self.basis.1.pow(k.1)?;
        Ok(match &self.offset {
            Some(o) => &u * o,
            None => u,
        })
    }

    /// Index box containing every lattice point within sup-distance `r` of `c`.
    fn index_box(&self, center: &[f64; 3], radius: f64) -> ((i64, i64), (i64, i64)) {
        let g: [[f64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| self.gram[i][j].mid_f64()));
        let l: [[f64; 3]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| self.logs[i][j].mid_f64()));
        let o: [f64; 3] = match &self.offset_log {
            Some(v) => std::array::from_fn(|j| v[j].mid_f64()),
            None => [0.0; 3],
        };
        let d: [f64; 3] = std::array::from_fn(|j| center[j] - o[j]);
        let rhs = [l[0].iter().zip(&d).map(|(a, b)| a * b).sum::<f64>(), l[1].iter().zip(&d).map(|(a, b)| a * b).sum::<f64>()];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let k0 = [(g[1][1] * rhs[0] - g[0][1] * rhs[1]) / det, (g[0][0] * rhs[1] - g[1][0] * rhs[0]) / det];
        // sup ball inside the euclidean ball of radius r sqrt 3
        let r2 = 3.0 * radius * radius;
        let s = [(r2 * g[1][1] / det).sqrt() + 1.0, (r2 * g[0][0] / det).sqrt() + 1.0];
        (
            ((k0[0] - s[0]).floor() as i64, (k0[0] + s[0]).ceil() as i64),
            ((k0[1] - s[1]).floor() as i64, (k0[1] + s[1]).ceil() as i64),
        )
    }
}

// Some(true) inside, Some(false) outside, None undecided
fn in_sup_ball(v: &[Ival; 3], c: &[Rational; 3], r: &Rational) -> Option<bool> {
    let mut sure = true;
    for j in 0..3 {
        let p = v[j].prec;
        let d = v[j].sub(&Ival::from_ratio(&c[j], p));
        let lo = Ival::from_ratio(&-r.clone(), p);
        let hi = Ival::from_ratio(r, p);
        if d.lo > hi.hi || d.hi < lo.lo {
            return Some(false);
        }
        if !(d.lo >= lo.hi && d.hi <= hi.lo) {
            sure = false;
        }
    }
    if sure {
        Some(true)
    } else {
        None
    }
}

/// Lattice points whose logarithm lies in the closed sup-norm ball.
pub fn lattice_points_in_ball(geo: &Geometry, lat: &LogLattice, center: &[Rational; 3], radius: &Rational, cfg: &SignConfig) -> Result<BallPoints> {
    if !radius.is_positive() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let cf: [f64; 3] = std::array::from_fn(|j| center[j].to_f64().unwrap_or(0.0));
    let ((a0, a1), (b0, b1)) = lat.index_box(&cf, radius.to_f64().unwrap_or(0.0));
    let mut out = BallPoints::default();
    let mut finer: BTreeMap<u32, LogLattice> = BTreeMap::new();
    for k1 in a0..=a1 {
        for k2 in b0..=b1 {
            let mut verdict = in_sup_ball(&lat.log_of((k1, k2)), center, radius);
            if verdict.is_none() {
                for bits in cfg.levels().into_iter().filter(|&b| b > lat.bits) {
                    if let std::collections::btree_map::Entry::Vacant(e) = finer.entry(bits) {
                        let (u1, u2) = &lat.basis;
                        e.insert(LogLattice::new(geo, u1, u2, lat.offset.as_ref(), bits)?);
                    }
                    verdict = in_sup_ball(&finer[&bits].log_of((k1, k2)), center, radius);
                    if verdict.is_some() {
                        break;
                    }
                }
            }
            match verdict {
                Some(true) => out.inside.push(LatticePoint { k: (k1, k2), element: lat.element_of((k1, k2))? }),
                Some(false) => {}
                None => out.undecided.push(LatticePoint { k: (k1, k2), element: lat.element_of((k1, k2))? }),
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SignCheck {
    pub name: String,
    pub expected: i32,
    pub got: i32,
}

/// The two sign conditions on the units and the four on `omega pi`.
#[derive(Clone, Debug, Serialize)]
pub struct SignSuite {
    pub checks: Vec<SignCheck>,
    /// `delta[e1|e2] = 1` and `delta[e2|e1] = -1`
    pub units_pass: bool,
    /// each pair `[e_i|p]`, `[p|e_i]` has opposite nonzero signs
    pub coset_pass: bool,
    /// the four coset signs equal the literal pattern `1, -1, 1, -1`
    pub coset_literal: bool,
}

impl SignSuite {
    pub fn pass(&self) -> bool {
        self.units_pass && self.coset_pass
    }
}

pub fn check_sign_suite(geo: &Geometry, e1: &Element, e2: &Element, p: &Element) -> Result<SignSuite> {
    let emb = geo.embedding();
    let cfg = geo.sign_config();
    let d = |a: &Element, b: &Element| emb.delta_bracket(a, b, cfg);
    let got = [d(e1, e2)?, d(e2, e1)?, d(e1, p)?, d(p, e1)?, d(e2, p)?, d(p, e2)?];
    let names = ["[e1|e2]", "[e2|e1]", "[e1|p]", "[p|e1]", "[e2|p]", "[p|e2]"];
    let expected = [1, -1, 1, -1, 1, -1];
    let checks = (0..6).map(|i| SignCheck { name: names[i].into(), expected: expected[i], got: got[i] }).collect();
    let units_pass = got[0] == 1 && got[1] == -1;
    let coset_pass = got[2] != 0 && got[2] == -got[3] && got[4] != 0 && got[4] == -got[5];
    let coset_literal = got[2..] == expected[2..];
    Ok(SignSuite { checks, units_pass, coset_pass, coset_literal })
}

/// Least `l <= l_max` for which the side conditions hold and the four
/// endpoint slopes have the limiting signs.
pub fn choose_power(basis: &PlaneBasis, l_max: i64, min_power: i64, n_points: usize, cfg: &SignConfig) -> Result<i64> {
    let [g1, g2] = basis.units();
    let f = check_fixgi(basis.embedding(), g1, g2, cfg)?;
    if !f.chain1 {
        return Err(Error::FixgiViolated(1));
    }
    if !f.chain2 {
        return Err(Error::FixgiViolated(2));
    }
    let want = [(1u8, 0u8, 1), (1, 1, -1), (2, 0, -1), (2, 1, 1)];
    for l in min_power.max(1)..=l_max {
        let mut ok = true;
        for &(i, t, s) in &want {
            if basis.endpoint_derivative(i, l, t)?.sign() != Some(s) {
                ok = false;
                break;
            }
        }
        if ok && basis.check_direction_bounds(l, n_points, cfg)?.pass {
            return Ok(l);
        }
    }
    Err(Error::Exhausted(format!("no power up to {}", l_max)))
}

/// Output of the triangle search.
#[derive(Clone, Debug)]
pub struct TriangleHit {
    pub alpha: Element,
    pub omega: Element,
    /// exponents of `omega^-1` in the search basis
    pub k: (i64, i64),
    pub q: f64,
}

/// The two triangles at the corner `(1, 1)` in the plane of `(e1, e2)`.
#[derive(Clone, Copy, Debug)]
struct Triangles {
    tan_theta: f64,
    tan_gamma: f64,
    cos_theta: f64,
}

impl Triangles {
    fn contains(&self, q: f64, x: f64, y: f64) -> bool {
        y <= 1.0 && x <= 1.0 && y >= 1.0 - self.tan_theta * (1.0 - x) && x >= 1.0 - self.tan_gamma * y && x >= 1.0 - q * self.cos_theta
    }
}

/// Search the coset `pi^-1 <s1, s2>` for a point in the two triangles at
/// `(1, 1)` whose ray is in `C([e1|e2]) u C([e2|e1]) u C(1, e1 e2)`.
/// `accept` filters candidates further; the first in lexicographic order of
/// exponents wins at the smallest `Q`.
pub fn triangle_search_with(
    geo: &Geometry,
    e: (&Element, &Element),
    search: (&Element, &Element),
    pi: &Element,
    q_max: f64,
    cfg: &SignConfig,
    mut accept: impl FnMut(&Element) -> Result<bool>,
) -> Result<TriangleHit> {
    let (e1, e2) = e;
    let target = target_union(geo, e1, e2)?;
    let pinv = pi.inv()?;
    let one = geo.one();
    if target.contains(&pinv) && accept(&one)? {
        return Ok(TriangleHit { alpha: pinv, omega: one, k: (0, 0), q: 0.0 });
    }
    let basis = PlaneBasis::new(geo.embedding(), e1, e2, 64)?;
    let d1 = basis.limit_derivative(1, 1, cfg)?.mid_f64();
    let d2 = basis.limit_derivative(2, 1, cfg)?.mid_f64();
    let theta = (d2 / 2.0).atan();
    let tri = Triangles { tan_theta: theta.tan(), tan_gamma: (d1 / 2.0).abs(), cos_theta: theta.cos() };
    let p0 = basis.phi(&pinv)?;
    let s = [basis.phi(search.0)?, basis.phi(search.1)?];
    let sf: [[f64; 2]; 2] = std::array::from_fn(|i| [s[i].x_f64(), s[i].y_f64()]);
    let (px, py) = (p0.x_f64(), p0.y_f64());
    let det = sf[0][0] * sf[1][1] - sf[0][1] * sf[1][0];
    if det == 0.0 {
        return Err(Error::DegenerateBasis);
    }
    let len = |v: &[f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut q = 0.5 * (len(&sf[0]) + len(&sf[1]));
    let mut tried = std::collections::BTreeSet::new();
    while q <= q_max {
        // the region lies in the box [1 - q cos, 1] x [1 - q, 1]; candidates are
        // lattice points whose image lands in that box, enlarged by a cell
        let corners = [(1.0 - q, 1.0 - q), (1.0 - q, 1.0), (1.0, 1.0 - q), (1.0, 1.0)];
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (x, y) in corners {
            let (dx, dy) = (x - px, y - py);
            let k = [(dx * sf[1][1] - dy * sf[1][0]) / det, (sf[0][0] * dy - sf[0][1] * dx) / det];
            for i in 0..2 {
                lo[i] = lo[i].min(k[i]);
                hi[i] = hi[i].max(k[i]);
            }
        }
        let mut cands = vec![];
        for a in (lo[0].floor() as i64 - 1)..=(hi[0].ceil() as i64 + 1) {
            for b in (lo[1].floor() as i64 - 1)..=(hi[1].ceil() as i64 + 1) {
                let x = px + a as f64 * sf[0][0] + b as f64 * sf[1][0];
                let y = py + a as f64 * sf[0][1] + b as f64 * sf[1][1];
                if tri.contains(q, x, y) && !tried.contains(&(a, b)) {
                    cands.push((a, b));
                }
            }
        }
        for (a, b) in cands {
            tried.insert((a, b));
            let w_inv = &search.0.pow(a)? * &search.1.pow(b)?;
            let alpha = &pinv * &w_inv;
            if target.contains(&alpha) {
                let omega = w_inv.inv()?;
                if accept(&omega)? {
                    return Ok(TriangleHit { alpha, omega, k: (a, b), q });
                }
            }
        }
        q *= 2.0;
    }
    Err(Error::Exhausted(format!("no coset point in the triangles up to Q = {}", q_max)))
}

pub fn triangle_search(geo: &Geometry, e: (&Element, &Element), search: (&Element, &Element), pi: &Element, q_max: f64, cfg: &SignConfig) -> Result<TriangleHit> {
    triangle_search_with(geo, e, search, pi, q_max, cfg, |_| Ok(true))
}

/// `C([e1|e2]) u C([e2|e1]) u C(1, e1 e2)`.
pub fn target_union(geo: &Geometry, e1: &Element, e2: &Element) -> Result<ShintaniSet> {
    let a = ShintaniSet::single(geo.bracket_cone(e1, e2)?);
    let b = ShintaniSet::single(geo.bracket_cone(e2, e1)?);
    let c = ShintaniSet::single(geo.cone(&[geo.one(), e1 * e2])?);
    Ok(a.union(&b).union(&c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    Case1,
    Case2,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case: Case,
    pub cover: CoverBox,
}

/// Case 1 when `pi^-1 B` is covered by the 2x2 block of translates of `B`,
/// Case 2 when it needs the 2x3 block.
pub fn classify_case(geo: &Geometry, e1: &Element, e2: &Element, pi: &Element, window: i64) -> Result<CaseReport> {
    let b = geo.explicit_b(e1, e2)?;
    let cover = geo.translation_cover(&b, pi, e1, e2, window)?;
    let case = match cover.alpha {
        (a, b) if a <= 1 && b <= 1 => Case::Case1,
        (a, 2) if a <= 1 => Case::Case2,
        (a, b) => return Err(Error::InclusionViolated(format!("cover box ({}, {}) exceeds (1, 2)", a, b))),
    };
    Ok(CaseReport { case, cover })
}

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    /// base units for the power step; the input pair when absent
    pub overrides: Option<(Element, Element)>,
    pub l_max: i64,
    pub min_power: i64,
    pub q_max: f64,
    pub n_points: usize,
    pub window: i64,
    pub bits: u32,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams { overrides: None, l_max: 8, min_power: 1, q_max: 64.0, n_points: 256, window: 6, bits: 64 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ConstructionResult {
    pub e1: Element,
    pub e2: Element,
    pub omega: Element,
    pub l: i64,
    pub case: Case,
    pub cover: CoverBox,
    pub signs: SignSuite,
    pub evidence: BTreeMap<String, Evidence>,
}

impl ConstructionResult {
    /// Re-check the four properties from scratch.
    pub fn reverify(&self, geo: &Geometry, pi: &Element) -> Result<bool> {
        let p = &self.omega * pi;
        let s = check_sign_suite(geo, &self.e1, &self.e2, &p)?;
        let t = target_union(geo, &self.e1, &self.e2)?;
        Ok(s.pass() && t.contains(&p.inv()?))
    }
}

fn require_unit(x: &Element) -> Result<()> {
    if x.norm().abs() != Rational::from_integer(1.into()) {
        return Err(Error::NotAUnit(x.to_string()));
    }
    Ok(())
}

/// Fixgi check, power, triangle search and sign suite, then the case.
pub fn build_construction(geo: &Geometry, g1: &Element, g2: &Element, pi: &Element, params: &ConstructionParams) -> Result<ConstructionResult> {
    require_unit(g1)?;
    require_unit(g2)?;
    if !geo.embedding().is_totally_positive(pi, geo.sign_config())? {
        return Err(Error::NotTotallyPositive(pi.to_string()));
    }
    if geo.embedding().delta_bracket(g1, g2, geo.sign_config())? == 0 {
        return Err(Error::DependentGenerators);
    }
    let cfg = geo.sign_config();
    let mut evidence = BTreeMap::new();
    let (b1, b2) = match &params.overrides {
        Some((a, b)) => {
            require_unit(a)?;
            require_unit(b)?;
            (a.clone(), b.clone())
        }
        None => (g1.clone(), g2.clone()),
    };
    let fix = check_fixgi(geo.embedding(), &b1, &b2, cfg)?;
    evidence.insert("fixgi".into(), Evidence { pass: fix.pass(), detail: format!("chain1 {}, chain2 {}", fix.chain1, fix.chain2) });
    if !fix.chain1 {
        return Err(Error::FixgiViolated(1));
    }
    if !fix.chain2 {
        return Err(Error::FixgiViolated(2));
    }
    let basis = PlaneBasis::new(geo.embedding(), &b1, &b2, params.bits)?;
    let l = choose_power(&basis, params.l_max, params.min_power, params.n_points, cfg)?;
    evidence.insert("power".into(), Evidence { pass: true, detail: format!("l = {}", l) });
    let e1 = b1.pow(l)?;
    let e2 = b2.pow(l)?;
    let hit = triangle_search_with(geo, (&e1, &e2), (g1, g2), pi, params.q_max, cfg, |w| {
        Ok(check_sign_suite(geo, &e1, &e2, &(w * pi))?.pass())
    })?;
    evidence.insert("triangle".into(), Evidence { pass: true, detail: format!("omega^-1 = g1^{} g2^{}, Q = {}", hit.k.0, hit.k.1, hit.q) });
    let p = &hit.omega * pi;
    let signs = check_sign_suite(geo, &e1, &e2, &p)?;
    evidence.insert("signs".into(), Evidence { pass: signs.pass(), detail: format!("{:?}", signs.checks.iter().map(|c| c.got).collect::<Vec<_>>()) });
    let t = target_union(geo, &e1, &e2)?;
    let p4 = t.contains(&p.inv()?);
    evidence.insert("property4".into(), Evidence { pass: p4, detail: "omega^-1 pi^-1 in the target union".into() });
    if !signs.pass() {
        return Err(Error::SignConditionFailed("coset signs".into()));
    }
    if !p4 {
        return Err(Error::InclusionViolated("omega^-1 pi^-1 outside the target union".into()));
    }
    let cr = classify_case(geo, &e1, &e2, &p, params.window)?;
    evidence.insert("case".into(), Evidence { pass: true, detail: format!("{:?}, box {:?}", cr.case, cr.cover.alpha) });
    Ok(ConstructionResult { e1, e2, omega: hit.omega, l, case: cr.case, cover: cr.cover, signs, evidence })
}

/// Interval plane point helper used by reports.
pub fn plane_point_f64(p: &PlanePoint) -> [f64; 3] {
    [p.x_f64(), p.y_f64(), p.err()]
}
