//! Relatively open polyhedral cones in rational 3-space, kept as integer rays.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type IVec = [BigInt; 3];

pub fn dot(a: &IVec, b: &IVec) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn cross(a: &IVec, b: &IVec) -> IVec {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

pub fn det(a: &IVec, b: &IVec, c: &IVec) -> BigInt {
    dot(a, &cross(b, c))
}

pub fn add(a: &IVec, b: &IVec) -> IVec {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn neg(a: &IVec) -> IVec {
    [-&a[0], -&a[1], -&a[2]]
}

pub fn is_zero(a: &IVec) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Divide out the content, keeping the direction.
pub fn primitive(a: &IVec) -> IVec {
    let g = a[0].gcd(&a[1]).gcd(&a[2]);
    if g.is_zero() {
        return a.clone();
    }
    [&a[0] / &g, &a[1] / &g, &a[2] / &g]
}

fn scaled_sum(s: &BigInt, u: &IVec, t: &BigInt, v: &IVec) -> IVec {
    [s * &u[0] + t * &v[0], s * &u[1] + t * &v[1], s * &u[2] + t * &v[2]]
}

/// The point of the open segment `(u, v)` on the plane `n.x = 0`, given
/// strictly opposite signs of `su = n.u` and `sv = n.v`.
fn crossing(u: &IVec, su: &BigInt, v: &IVec, sv: &BigInt) -> IVec {
    primitive(&scaled_sum(&sv.abs(), u, &su.abs(), v))
}

/// A linear condition on points `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// `n.x > 0`
    Pos(IVec),
    /// `n.x = 0`
    Zero(IVec),
}

impl Constraint {
    pub fn holds(&self, x: &IVec) -> bool {
        match self {
            Constraint::Pos(n) => dot(n, x).is_positive(),
            Constraint::Zero(n) => dot(n, x).is_zero(),
        }
    }

    pub fn normal(&self) -> &IVec {
        match self {
            Constraint::Pos(n) | Constraint::Zero(n) => n,
        }
    }

    /// Disjoint pieces covering the complement.
    pub fn negations(&self) -> Vec<Constraint> {
        match self {
            Constraint::Pos(n) => vec![Constraint::Zero(n.clone()), Constraint::Pos(neg(n))],
            Constraint::Zero(n) => vec![Constraint::Pos(n.clone()), Constraint::Pos(neg(n))],
        }
    }
}

/// Relative interior of the cone spanned by `rays`; for dimension 3 the rays
/// are the extreme rays in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub rays: Vec<IVec>,
}

impl Piece {
    pub fn new(rays: Vec<IVec>) -> Self {
        Piece { rays: rays.iter().map(primitive).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rays.len().min(3)
    }

    /// A point of the relative interior.
    pub fn interior_point(&self) -> IVec {
        let mut s = self.rays[0].clone();
        for r in &self.rays[1..] {
            s = add(&s, r);
        }
        primitive(&s)
    }

    pub fn restrict(&self, c: &Constraint) -> Option<Piece> {
        match c {
            Constraint::Pos(n) => self.restrict_pos(n),
            Constraint::Zero(n) => self.restrict_zero(n),
        }
    }

    fn restrict_pos(&self, n: &IVec) -> Option<Piece> {
        let s: Vec<BigInt> = self.rays.iter().map(|r| dot(n, r)).collect();
        if s.iter().all(|x| x.is_positive()) {
            return Some(self.clone());
        }
        if s.iter().all(|x| !x.is_positive()) {
            return None;
        }
        match self.rays.len() {
            1 => None,
            2 => {
                let (a, b) = (&self.rays[0], &self.rays[1]);
                let w = if s[0].is_positive() {
                    (a, if s[1].is_zero() { b.clone() } else { crossing(a, &s[0], b, &s[1]) })
                } else {
                    (b, if s[0].is_zero() { a.clone() } else { crossing(a, &s[0], b, &s[1]) })
                };
                Some(Piece { rays: vec![w.0.clone(), w.1] })
            }
            _ => {
                let m = self.rays.len();
                let mut out: Vec<IVec> = Vec::new();
                for i in 0..m {
                    let j = (i + 1) % m;
                    let (p, q) = (&self.rays[i], &self.rays[j]);
                    let (sp, sq) = (&s[i], &s[j]);
                    if !sp.is_negative() {
                        out.push(p.clone());
                    }
                    if (sp.is_positive() && sq.is_negative()) || (sp.is_negative() && sq.is_positive()) {
                        out.push(crossing(p, sp, q, sq));
                    }
                }
                polygon_from(out)
            }
        }
    }

    fn restrict_zero(&self, n: &IVec) -> Option<Piece> {
        let s: Vec<BigInt> = self.rays.iter().map(|r| dot(n, r)).collect();
        match self.rays.len() {
            1 => s[0].is_zero().then(|| self.clone()),
            2 => {
                if s[0].is_zero() && s[1].is_zero() {
                    Some(self.clone())
                } else if s[0].is_positive() && s[1].is_negative() || s[0].is_negative() && s[1].is_positive() {
                    Some(Piece { rays: vec![crossing(&self.rays[0], &s[0], &self.rays[1], &s[1])] })
                } else {
                    None
                }
            }
            _ => {
                let has_pos = s.iter().any(|x| x.is_positive());
                let has_neg = s.iter().any(|x| x.is_negative());
                if !(has_pos && has_neg) {
                    return None;
                }
                let m = self.rays.len();
                let mut pts = Vec::new();
                for i in 0..m {
                    let j = (i + 1) % m;
                    if s[i].is_zero() {
                        pts.push(self.rays[i].clone());
                    } else if (s[i].is_positive() && s[j].is_negative()) || (s[i].is_negative() && s[j].is_positive()) {
                        pts.push(crossing(&self.rays[i], &s[i], &self.rays[j], &s[j]));
                    }
                }
                debug_assert_eq!(pts.len(), 2, "a line meets a convex polygon twice");
                Some(Piece { rays: pts })
            }
        }
    }

    /// Split into open simplicial pieces (fan from the first ray).
    pub fn simplices(&self) -> Vec<Piece> {
        let m = self.rays.len();
        if m <= 3 {
            return vec![self.clone()];
        }
        let r0 = &self.rays[0];
        let mut out = Vec::with_capacity(2 * m - 5);
        for i in 1..m - 1 {
            out.push(Piece { rays: vec![r0.clone(), self.rays[i].clone(), self.rays[i + 1].clone()] });
            if i + 1 < m - 1 {
                out.push(Piece { rays: vec![r0.clone(), self.rays[i + 1].clone()] });
            }
        }
        out
    }
}

/// Clean up a clipped cycle: drop repeats and rays interior to an edge.
fn polygon_from(mut pts: Vec<IVec>) -> Option<Piece> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    loop {
        let m = pts.len();
        if m < 3 {
            return None;
        }
        let mut removed = false;
        for i in 0..m {
            let prev = &pts[(i + m - 1) % m];
            let next = &pts[(i + 1) % m];
            if det(prev, &pts[i], next).is_zero() {
                pts.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return Some(Piece { rays: pts });
        }
    }
}

/// Constraints cutting out the open simplicial cone on independent rays.
pub fn simplex_constraints(rays: &[IVec]) -> Vec<Constraint> {
    let orient = |n: IVec, r: &IVec| {
        let n = primitive(&n);
        if dot(&n, r).is_negative() {
            neg(&n)
        } else {
            n
        }
    };
    match rays.len() {
        1 => {
            let a = &rays[0];
            let units: [IVec; 3] = std::array::from_fn(|i| {
                let mut e: IVec = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
                e[i] = BigInt::from(1);
                e
            });
            let mut ns: Vec<IVec> = Vec::new();
            for e in &units {
                let c = primitive(&cross(a, e));
                if is_zero(&c) {
                    continue;
                }
                if ns.iter().all(|m| !is_zero(&cross(m, &c))) {
                    ns.push(c);
                }
                if ns.len() == 2 {
                    break;
                }
            }
            ns.into_iter().map(Constraint::Zero).collect()
        }
        2 => {
            let (a, b) = (&rays[0], &rays[1]);
            let n = primitive(&cross(a, b));
            let ma = orient(cross(&n, b), a);
            let mb = orient(cross(&n, a), b);
            vec![Constraint::Zero(n), Constraint::Pos(ma), Constraint::Pos(mb)]
        }
        3 => {
            let (a, b, c) = (&rays[0], &rays[1], &rays[2]);
            vec![
                Constraint::Pos(orient(cross(b, c), a)),
                Constraint::Pos(orient(cross(c, a), b)),
                Constraint::Pos(orient(cross(a, b), c)),
            ]
        }
        n => panic!("simplex with {} rays", n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: i64, b: i64, c: i64) -> IVec {
        [a.into(), b.into(), c.into()]
    }

    #[test]
    fn clip_triangle() {
        let t = Piece::new(vec![v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]);
        let n = v(1, -1, 0);
        let p = t.restrict(&Constraint::Pos(n.clone())).unwrap();
        assert_eq!(p.rays.len(), 3);
        for r in &p.rays {
            assert!(!dot(&n, r).is_negative());
        }
        let z = t.restrict(&Constraint::Zero(n)).unwrap();
        assert_eq!(z.rays.len(), 2);
        assert!(t.restrict(&Constraint::Pos(v(-1, -1, -1))).is_none());
        assert!(t.restrict(&Constraint::Zero(v(1, 0, 0))).is_none());
    }

    #[test]
    fn clip_to_quadrilateral_and_fan() {
        let t = Piece::new(vec![v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]);
        let p = t.restrict(&Constraint::Pos(v(3, 3, -1))).unwrap();
        assert_eq!(p.rays.len(), 4);
        let s = p.simplices();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn simplex_constraints_describe_cells() {
        let rays = vec![v(1, 0, 0), v(1, 1, 0), v(1, 1, 1)];
        let cs = simplex_constraints(&rays);
        let inside = v(3, 2, 1);
        assert!(cs.iter().all(|c| c.holds(&inside)));
        assert!(!cs.iter().all(|c| c.holds(&v(1, 1, 0))));
        let edge = simplex_constraints(&rays[..2]);
        assert!(edge.iter().all(|c| c.holds(&v(2, 1, 0))));
        assert!(!edge.iter().all(|c| c.holds(&v(1, 0, 0))));
        let ray = simplex_constraints(&rays[..1]);
        assert!(ray.iter().all(|c| c.holds(&v(5, 0, 0))));
        assert!(!ray.iter().all(|c| c.holds(&v(5, 1, 0))));
    }
}
