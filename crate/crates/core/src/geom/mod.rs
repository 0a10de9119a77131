//! Exact set algebra of Shintani cones in power-basis coordinates.

mod cone;
pub mod polygon;
mod search;

use std::sync::Arc;

pub use cone::{element_of, ray_of, Cone, ShintaniSet};
pub use search::{CoverBox, FdHit, FdReport, Identity, IdentityCase, IdentityReport};

use crate::embed::{interval_det, Embedding, SignConfig};
use crate::error::{Error, Result};
use crate::{Element, Ival, Spec};

/// Geometry engine: exact set operations plus the embedding-dependent tests.
#[derive(Clone, Debug)]
pub struct Geometry {
    emb: Arc<Embedding>,
    cfg: SignConfig,
}

impl Geometry {
    pub fn new(emb: Arc<Embedding>, cfg: SignConfig) -> Self {
        Geometry { emb, cfg }
    }

    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.emb
    }

    pub fn spec(&self) -> &Arc<Spec> {
        self.emb.spec()
    }

    pub fn sign_config(&self) -> &SignConfig {
        &self.cfg
    }

    pub fn one(&self) -> Element {
        Element::one(self.spec())
    }

    fn require_tp(&self, x: &Element) -> Result<()> {
        if self.emb.is_totally_positive(x, &self.cfg)? {
            Ok(())
        } else {
            Err(Error::NotTotallyPositive(x.to_string()))
        }
    }

    /// Cone on totally positive, independent generators.
    pub fn cone(&self, gens: &[Element]) -> Result<Cone> {
        for g in gens {
            self.require_tp(g)?;
        }
        Cone::from_elements(gens)
    }

    pub fn cone_membership(&self, x: &Element, c: &Cone) -> bool {
        c.contains(x)
    }

    pub fn scale(&self, s: &ShintaniSet, u: &Element) -> Result<ShintaniSet> {
        self.require_tp(u)?;
        Ok(s.scale_unchecked(u))
    }

    pub fn sample_point(&self, s: &ShintaniSet) -> Result<Element> {
        let c = s.cells().first().ok_or(Error::EmptySet)?;
        Ok(element_of(self.spec(), &c.interior_point()))
    }

    pub fn sample_in_intersection(&self, a: &Cone, b: &Cone) -> Result<Element> {
        let i = ShintaniSet::single(a.clone()).intersect(&ShintaniSet::single(b.clone()));
        self.sample_point(&i)
    }

    /// Signs of the coordinates of `e1` in the basis of embedded generators.
    pub fn e1_coordinate_signs(&self, c: &Cone) -> Result<[i32; 3]> {
        assert_eq!(c.dim(), 3);
        let gens = c.generators(self.spec());
        let det_sign = self.emb.sign_det(&gens[0], &gens[1], &gens[2], &self.cfg)?;
        let mut out = [0; 3];
        'coord: for j in 0..3 {
            for bits in self.cfg.levels() {
                let mut cols: [[Ival; 3]; 3] = std::array::from_fn(|k| self.emb.embed_at(&gens[k], bits));
                let p = cols[0][0].prec;
                cols[j] = [Ival::one(p), Ival::zero(p), Ival::zero(p)];
                if let Some(s) = interval_det(&cols).sign().filter(|&s| s != 0) {
                    out[j] = s * det_sign;
                    continue 'coord;
                }
            }
            return Err(Error::PrecisionExhausted(self.cfg.max_bits));
        }
        Ok(out)
    }

    /// The cone together with the faces entered by a small push along `e1`.
    pub fn perturbed_closure(&self, c: &Cone) -> Result<ShintaniSet> {
        if c.dim() < 3 {
            // a 2-plane through embedded field points never contains e1
            return Ok(ShintaniSet::single(c.clone()));
        }
        let lam = self.e1_coordinate_signs(c)?;
        let mut cells = vec![c.clone()];
        for mask in 1u8..7 {
            if (0..3).all(|j| mask & (1 << j) != 0 || lam[j] > 0) {
                cells.push(c.face(mask));
            }
        }
        Ok(ShintaniSet::from_cells(cells))
    }

    pub fn bracket_cone(&self, u1: &Element, u2: &Element) -> Result<Cone> {
        self.cone(&[self.one(), u1.clone(), u1 * u2])
    }

    /// Union of the perturbed closures of `[e1|e2]` and `[e2|e1]`.
    pub fn colmez_domain(&self, e1: &Element, e2: &Element) -> Result<ShintaniSet> {
        self.require_bracket_signs(e1, e2)?;
        let a = self.perturbed_closure(&self.bracket_cone(e1, e2)?)?;
        let b = self.perturbed_closure(&self.bracket_cone(e2, e1)?)?;
        let d = a.union(&b);
        if let Some((i, j)) = d.overlap() {
            return Err(Error::InclusionViolated(format!("cells {} and {} of the domain overlap", i, j)));
        }
        Ok(d)
    }

    fn require_bracket_signs(&self, e1: &Element, e2: &Element) -> Result<()> {
        if self.emb.delta_bracket(e1, e2, &self.cfg)? != 1 {
            return Err(Error::SignConditionFailed("[1|2]".into()));
        }
        if self.emb.delta_bracket(e2, e1, &self.cfg)? != -1 {
            return Err(Error::SignConditionFailed("[2|1]".into()));
        }
        Ok(())
    }

    // opposite nonzero signs on the two orderings make the pair of cones a
    // domain for the group the two elements generate
    fn require_opposite(&self, u: &Element, v: &Element) -> Result<()> {
        let a = self.emb.delta_bracket(u, v, &self.cfg)?;
        let b = self.emb.delta_bracket(v, u, &self.cfg)?;
        if a == 0 || a != -b {
            return Err(Error::SignConditionFailed(format!("signs {} and {}", a, b)));
        }
        Ok(())
    }

    fn cells(&self, gens: &[&[&Element]]) -> Result<ShintaniSet> {
        let mut cells = vec![];
        for g in gens {
            let v: Vec<Element> = g.iter().map(|x| (*x).clone()).collect();
            cells.push(self.cone(&v)?);
        }
        Ok(ShintaniSet::from_cells(cells))
    }

    /// The six-cell domain for `<e1, e2>` with both boundary exponents equal to 1.
    pub fn explicit_b(&self, e1: &Element, e2: &Element) -> Result<ShintaniSet> {
        self.require_bracket_signs(e1, e2)?;
        let one = self.one();
        let e12 = e1 * e2;
        self.cells(&[&[&one], &[&one, e1], &[&one, e2], &[&one, &e12], &[&one, e1, &e12], &[&one, e2, &e12]])
    }

    /// The six-cell domain for `<e, pi>` built on the pair `(e, pi)`.
    pub fn explicit_b_pair(&self, e: &Element, pi: &Element) -> Result<ShintaniSet> {
        self.require_opposite(e, pi)?;
        let one = self.one();
        let ep = e * pi;
        self.cells(&[&[pi], &[pi, &ep], &[&one, pi], &[&one, &ep], &[&one, e, &ep], &[&one, pi, &ep]])
    }

    pub fn explicit_b1(&self, e2: &Element, pi: &Element) -> Result<ShintaniSet> {
        self.explicit_b_pair(e2, pi)
    }

    pub fn explicit_b2(&self, e1: &Element, pi: &Element) -> Result<ShintaniSet> {
        self.explicit_b_pair(e1, pi)
    }
}
