#![allow(dead_code)]

use std::sync::Arc;

use shintani_core::embed::{Embedding, SignConfig};
use shintani_core::geom::Geometry;
use shintani_core::{rat, Element, Spec};

pub const ORDER: [usize; 3] = [1, 2, 0];

pub struct Fx {
    pub spec: Arc<Spec>,
    pub emb: Arc<Embedding>,
    pub geo: Geometry,
    pub cfg: SignConfig,
    pub g1: Element,
    pub g2: Element,
    pub pi: Element,
    pub e1: Element,
    pub e2: Element,
    pub pi1: Element,
    pub pi2: Element,
}

pub fn fx() -> Fx {
    let spec = Spec::new([rat(1), rat(-1), rat(-4), rat(2)]).unwrap();
    let el = |a, b, c| Element::new(&spec, [rat(a), rat(b), rat(c)]);
    let g1 = el(113, 152, -96);
    let g2 = el(-31, 32, 160);
    let pi = el(177, -488, 192);
    let w = |a: i64, b: i64| &g1.pow(a).unwrap() * &g2.pow(b).unwrap();
    let e1 = w(-3, 4);
    let e2 = w(-5, 0);
    let pi1 = &w(6, -2) * &pi;
    let pi2 = &w(6, -1) * &pi;
    let emb = Embedding::new(&spec, ORDER).unwrap();
    let cfg = SignConfig::default();
    let geo = Geometry::new(emb.clone(), cfg);
    Fx { spec, emb, geo, cfg, g1, g2, pi, e1, e2, pi1, pi2 }
}

/// Roots of `2x^3 - 4x^2 - x + 1` by plain f64 bisection, ascending.
pub fn roots_f64() -> [f64; 3] {
    let f = |x: f64| ((2.0 * x - 4.0) * x - 1.0) * x + 1.0;
    let mut out = vec![];
    let n = 5000;
    for k in 0..n {
        let (mut a, mut b) = (-3.0 + 6.0 * k as f64 / n as f64, -3.0 + 6.0 * (k + 1) as f64 / n as f64);
        if f(a) == 0.0 {
            out.push(a);
            continue;
        }
        if f(a) * f(b) > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    assert_eq!(out.len(), 3);
    [out[0], out[1], out[2]]
}

/// Real embeddings in the configured order, in f64.
pub fn embed_f64(x: &Element) -> [f64; 3] {
    use num_traits::ToPrimitive;
    let r = roots_f64();
    let c: Vec<f64> = x.coords().iter().map(|q| q.to_f64().unwrap()).collect();
    ORDER.map(|j| c[0] + c[1] * r[j] + c[2] * r[j] * r[j])
}

/// `Log` followed by the projection to the trace-zero plane, in f64.
pub fn log_h_f64(x: &Element) -> [f64; 3] {
    let l = embed_f64(x).map(|v| v.abs().ln());
    let m = (l[0] + l[1] + l[2]) / 3.0;
    l.map(|v| v - m)
}

pub fn word(a: &Element, b: &Element, k: (i64, i64)) -> Element {
    &a.pow(k.0).unwrap() * &b.pow(k.1).unwrap()
}
