//! Simplicial cones and finite disjoint unions of them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::polygon::{self, Constraint, IVec, Piece};
use crate::error::{Error, Result};
use crate::{Element, Rational, Spec};

/// Primitive integer coordinate vector on the ray of `x`.
pub fn ray_of(x: &Element) -> IVec {
    let l = x.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lr = Rational::from_integer(l);
    let v: IVec = std::array::from_fn(|i| (&x.coords()[i] * &lr).to_integer());
    polygon::primitive(&v)
}

pub fn element_of(spec: &Arc<Spec>, v: &IVec) -> Element {
    Element::new(spec, v.clone().map(Rational::from_integer))
}

/// Relatively open simplicial cone; generators are canonical rays.
#[derive(Clone, PartialEq, Eq)]
pub struct Cone {
    rays: Vec<IVec>,
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C(")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{} {} {}]", r[0], r[1], r[2])?;
        }
        write!(f, ")")
    }
}

impl Cone {
    /// Cone on arbitrary nonzero generators; checks arity and independence
    /// but not total positivity (see `Geometry::cone`).
    pub fn from_elements(gens: &[Element]) -> Result<Self> {
        if gens.is_empty() || gens.len() > 3 {
            return Err(Error::BadArity(gens.len()));
        }
        Self::from_rays(gens.iter().map(ray_of).collect())
    }

    pub fn from_rays(rays: Vec<IVec>) -> Result<Self> {
        let mut rays: Vec<IVec> = rays.iter().map(polygon::primitive).collect();
        if rays.is_empty() || rays.len() > 3 {
            return Err(Error::BadArity(rays.len()));
        }
        if !independent(&rays) {
            return Err(Error::DependentGenerators);
        }
        rays.sort();
        Ok(Cone { rays })
    }

    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    pub fn generators(&self, spec: &Arc<Spec>) -> Vec<Element> {
        self.rays.iter().map(|r| element_of(spec, r)).collect()
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        polygon::simplex_constraints(&self.rays)
    }

    pub fn piece(&self) -> Piece {
        Piece { rays: self.rays.clone() }
    }

    /// Sum of the generators, a point of the cone.
    pub fn interior_point(&self) -> IVec {
        self.piece().interior_point()
    }

    /// Membership of a point already known to lie in the positive cone.
    pub fn contains_ray(&self, x: &IVec) -> bool {
        self.constraints().iter().all(|c| c.holds(x))
    }

    /// Exact membership: `x` is a strictly positive combination of the generators.
    pub fn contains(&self, x: &Element) -> bool {
        match coefficients(&self.rays, x) {
            Some(c) => c.iter().all(|v| v.is_positive()),
            None => false,
        }
    }

    pub fn scale(&self, u: &Element) -> Cone {
        let spec = u.spec();
        let rays = self.rays.iter().map(|r| ray_of(&(&element_of(spec, r) * u))).collect();
        Cone::from_rays(rays).expect("multiplication by a nonzero element keeps independence")
    }

    /// The face on the generators selected by `mask` (bit `i` for ray `i`).
    pub fn face(&self, mask: u8) -> Cone {
        let rays = self.rays.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, r)| r.clone()).collect();
        Cone::from_rays(rays).expect("faces of a simplicial cone are simplicial")
    }
}

fn independent(rays: &[IVec]) -> bool {
    match rays.len() {
        1 => !polygon::is_zero(&rays[0]),
        2 => !polygon::is_zero(&polygon::cross(&rays[0], &rays[1])),
        3 => !polygon::det(&rays[0], &rays[1], &rays[2]).is_zero(),
        _ => false,
    }
}

/// Coefficients of `x` in the span of the rays, if it lies in that span.
fn coefficients(rays: &[IVec], x: &Element) -> Option<Vec<Rational>> {
    let xv = x.coords();
    let r = |v: &IVec| v.clone().map(Rational::from_integer);
    let rs: Vec<[Rational; 3]> = rays.iter().map(r).collect();
    match rs.len() {
        1 => {
            // x = c * a
            let a = &rs[0];
            let k = (0..3).find(|&i| !a[i].is_zero())?;
            let c = &xv[k] / &a[k];
            (0..3).all(|i| &a[i] * &c == xv[i]).then(|| vec![c])
        }
        2 => {
            let (a, b) = (&rs[0], &rs[1]);
            // pick two rows with a nonzero 2x2 minor
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let d = &a[i] * &b[j] - &a[j] * &b[i];
                if d.is_zero() {
                    continue;
                }
                let ca = (&xv[i] * &b[j] - &xv[j] * &b[i]) / &d;
                let cb = (&a[i] * &xv[j] - &a[j] * &xv[i]) / &d;
                let ok = (0..3).all(|k| &a[k] * &ca + &b[k] * &cb == xv[k]);
                return ok.then(|| vec![ca, cb]);
            }
            None
        }
        _ => {
            let m = [rs[0].clone(), rs[1].clone(), rs[2].clone()];
            let d = det_cols(&m);
            let mut out = Vec::with_capacity(3);
            for k in 0..3 {
                let mut mk = m.clone();
                mk[k] = xv.clone();
                out.push(det_cols(&mk) / &d);
            }
            Some(out)
        }
    }
}

fn det_cols(c: &[[Rational; 3]; 3]) -> Rational {
    crate::field::det3(c)
}

/// Finite union of pairwise disjoint open cones, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ShintaniSet {
    cells: Vec<Cone>,
}

impl fmt::Debug for ShintaniSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.cells.iter()).finish()
    }
}

fn cell_key(c: &Cone) -> (usize, &[IVec]) {
    (c.dim(), c.rays())
}

impl ShintaniSet {
    pub fn empty() -> Self {
        ShintaniSet { cells: vec![] }
    }

    pub fn from_cells(mut cells: Vec<Cone>) -> Self {
        cells.sort_by(|a, b| cell_key(a).cmp(&cell_key(b)));
        cells.dedup();
        ShintaniSet { cells }
    }

    pub fn single(c: Cone) -> Self {
        ShintaniSet { cells: vec![c] }
    }

    pub fn cells(&self) -> &[Cone] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn contains_ray(&self, x: &IVec) -> bool {
        self.cells.iter().any(|c| c.contains_ray(x))
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.cells.iter().any(|c| c.contains(x))
    }

    /// Disjoint union; the caller guarantees disjointness.
    pub fn union(&self, o: &Self) -> Self {
        let mut cells = self.cells.clone();
        cells.extend(o.cells.iter().cloned());
        Self::from_cells(cells)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a ShintaniSet>) -> Self {
        let mut cells = vec![];
        for s in sets {
            cells.extend(s.cells.iter().cloned());
        }
        Self::from_cells(cells)
    }

    /// Multiplication by a nonzero element; no positivity check here.
    pub fn scale_unchecked(&self, u: &Element) -> Self {
        Self::from_cells(self.cells.iter().map(|c| c.scale(u)).collect())
    }

    pub fn intersect(&self, o: &Self) -> Self {
        let mut cells = vec![];
        for a in &self.cells {
            for b in &o.cells {
                if let Some(p) = intersect_cells(a, b) {
                    for s in p.simplices() {
                        cells.push(Cone::from_rays(s.rays).expect("simplicial piece"));
                    }
                }
            }
        }
        Self::from_cells(cells)
    }

    /// Whether the sets meet, without building the intersection.
    pub fn meets(&self, o: &Self) -> bool {
        self.cells.iter().any(|a| o.cells.iter().any(|b| intersect_cells(a, b).is_some()))
    }

    /// A point of `self` outside `o`, if any.
    pub fn difference_witness(&self, o: &Self) -> Option<IVec> {
        for a in &self.cells {
            let mut rest = vec![a.piece()];
            for b in &o.cells {
                rest = rest.into_iter().flat_map(|p| subtract(&p, b)).collect();
                if rest.is_empty() {
                    break;
                }
            }
            if let Some(p) = rest.first() {
                return Some(p.interior_point());
            }
        }
        None
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.difference_witness(o).is_none()
    }

    /// Equality as point sets, with a point of the symmetric difference.
    pub fn set_equal(&self, o: &Self) -> (bool, Option<IVec>) {
        if let Some(w) = self.difference_witness(o) {
            return (false, Some(w));
        }
        if let Some(w) = o.difference_witness(self) {
            return (false, Some(w));
        }
        (true, None)
    }

    /// First pair of overlapping cells, if any.
    pub fn overlap(&self) -> Option<(usize, usize)> {
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                if intersect_cells(&self.cells[i], &self.cells[j]).is_some() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_disjoint(&self) -> bool {
        self.overlap().is_none()
    }

    pub fn count_by_dim(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for cell in &self.cells {
            c[cell.dim() - 1] += 1;
        }
        c
    }
}

fn intersect_cells(a: &Cone, b: &Cone) -> Option<Piece> {
    // restrict the lower-dimensional cell by the other's constraints
    let (base, cut) = if a.dim() <= b.dim() { (a, b) } else { (b, a) };
    let mut p = base.piece();
    for c in cut.constraints() {
        p = p.restrict(&c)?;
    }
    Some(p)
}

/// `p` minus the cell `b`, as disjoint pieces.
fn subtract(p: &Piece, b: &Cone) -> Vec<Piece> {
    let mut out = vec![];
    let mut inside = p.clone();
    for c in b.constraints() {
        for n in c.negations() {
            if let Some(q) = inside.restrict(&n) {
                out.push(q);
            }
        }
        match inside.restrict(&c) {
            Some(q) => inside = q,
            None => return out,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: i64, b: i64, c: i64) -> IVec {
        [a.into(), b.into(), c.into()]
    }

    fn cone(rays: &[IVec]) -> Cone {
        Cone::from_rays(rays.to_vec()).unwrap()
    }

    #[test]
    fn closed_triangle_decomposition_equals_itself() {
        let (a, b, c) = (v(1, 0, 0), v(0, 1, 0), v(0, 0, 1));
        let t = ShintaniSet::single(cone(&[a.clone(), b.clone(), c.clone()]));
        let m = v(1, 1, 0);
        let split = ShintaniSet::from_cells(vec![
            cone(&[a.clone(), m.clone(), c.clone()]),
            cone(&[m.clone(), b.clone(), c.clone()]),
            cone(&[m.clone(), c.clone()]),
        ]);
        assert!(split.is_disjoint());
        assert_eq!(t.set_equal(&split), (true, None));
        let partial = ShintaniSet::from_cells(vec![cone(&[a.clone(), m.clone(), c.clone()]), cone(&[m, b, c])]);
        let (eq, w) = t.set_equal(&partial);
        assert!(!eq);
        let w = w.unwrap();
        assert!(t.contains_ray(&w) && !partial.contains_ray(&w));
    }

    #[test]
    fn intersection_of_overlapping_triangles() {
        let t1 = ShintaniSet::single(cone(&[v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]));
        let t2 = ShintaniSet::single(cone(&[v(1, 1, 0), v(0, 1, 1), v(1, 0, 1)]));
        let i = t1.intersect(&t2);
        assert_eq!(i.set_equal(&t2), (true, None));
        assert!(i.is_disjoint());
        let t3 = ShintaniSet::single(cone(&[v(1, 0, 0), v(1, 1, 0), v(1, 0, 1)]));
        let j = t1.intersect(&t3);
        assert!(j.set_equal(&t3).0);
    }

    #[test]
    fn shared_edge_is_not_an_overlap() {
        let a = cone(&[v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]);
        let b = cone(&[v(1, 0, 0), v(0, 1, 0), v(1, 1, -1)]);
        assert!(ShintaniSet::from_cells(vec![a.clone(), b]).is_disjoint());
        let e = cone(&[v(1, 0, 0), v(0, 1, 0)]);
        assert!(ShintaniSet::from_cells(vec![a, e]).is_disjoint());
    }
}
