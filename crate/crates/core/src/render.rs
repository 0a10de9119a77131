//! Deterministic SVG and CSV output for scenes in the logarithmic plane.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::geom::ShintaniSet;
use crate::plane::{CurveId, CurveSample, PlaneBasis, PlanePoint};
use crate::Element;

/// Samples per curve unless a scene says otherwise.
pub const DEFAULT_POINTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Style {
    pub stroke: String,
    pub width: f64,
}

pub fn default_styles() -> BTreeMap<String, Style> {
    let mut m = BTreeMap::new();
    m.insert("blue".into(), Style { stroke: "#1f4fbf".into(), width: 1.0 });
    m.insert("red".into(), Style { stroke: "#c8202a".into(), width: 1.0 });
    m.insert("black".into(), Style { stroke: "#000000".into(), width: 1.0 });
    m
}

#[derive(Clone, Debug)]
pub enum Item {
    Curve { sample: CurveSample, style: String },
    Marker { label: String, point: PlanePoint, style: String },
}

#[derive(Clone, Debug, Default)]
pub struct Scene {
    pub title: String,
    pub items: Vec<Item>,
    /// named sets drawn in the scene, with their cell counts by dimension
    pub sets: BTreeMap<String, [usize; 3]>,
}

impl Scene {
    pub fn new(title: &str) -> Self {
        Scene { title: title.to_string(), ..Default::default() }
    }

    pub fn curve(&mut self, sample: CurveSample, style: &str) {
        self.items.push(Item::Curve { sample, style: style.to_string() });
    }

    pub fn marker(&mut self, label: &str, point: PlanePoint, style: &str) {
        self.items.push(Item::Marker { label: label.to_string(), point, style: style.to_string() });
    }
}

/// Structural description compared against golden files.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FigureSummary {
    pub title: String,
    pub curves: usize,
    pub markers: usize,
    pub curves_by_style: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, [usize; 3]>,
    /// `[x0, y0, x1, y1]` per curve, rounded to 6 places
    pub endpoints: Vec<(String, [f64; 4])>,
    /// `[xmin, ymin, xmax, ymax]`, rounded to 4 places
    pub bbox: [f64; 4],
}

#[derive(Clone, Debug)]
pub struct Figure {
    pub svg: String,
    pub csv: String,
    pub summary: FigureSummary,
}

fn round_to(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    let r = (x * s).round() / s;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn bbox(scene: &Scene) -> Option<[f64; 4]> {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    let mut any = false;
    let mut take = |p: &PlanePoint| {
        let (x, y) = (p.x_f64(), p.y_f64());
        b[0] = b[0].min(x);
        b[1] = b[1].min(y);
        b[2] = b[2].max(x);
        b[3] = b[3].max(y);
        any = true;
    };
    for it in &scene.items {
        match it {
            Item::Curve { sample, .. } => sample.points.iter().for_each(&mut take),
            Item::Marker { point, .. } => take(point),
        }
    }
    any.then_some(b)
}

pub fn render(scene: &Scene, styles: &BTreeMap<String, Style>) -> Figure {
    let fallback = Style { stroke: "#000000".into(), width: 1.0 };
    let b = bbox(scene).unwrap_or([0.0, 0.0, 1.0, 1.0]);
    let span = ((b[2] - b[0]).max(b[3] - b[1])).max(1e-9);
    let pad = 0.05 * span;
    let (vx, vy) = (b[0] - pad, b[1] - pad);
    let (vw, vh) = (b[2] - b[0] + 2.0 * pad, b[3] - b[1] + 2.0 * pad);
    let (vw, vh) = (vw.max(1e-9), vh.max(1e-9));
    let px = 800.0;
    let scale = px / vw.max(vh);
    let (w, h) = (vw * scale, vh * scale);
    let tx = |x: f64| (x - vx) * scale;
    let ty = |y: f64| h - (y - vy) * scale;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        w.ceil(),
        h.ceil(),
        w,
        h
    );
    let _ = writeln!(svg, "<title>{}</title>", xml_escape(&scene.title));
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{:.3}" height="{:.3}" fill="white"/>"#, w, h);
    let mut csv = csv::Writer::from_writer(Vec::new());
    row(&mut csv, ["curve_id", "t", "x", "y", "err"]);
    let mut curves_by_style = BTreeMap::new();
    let mut endpoints = vec![];
    let (mut nc, mut nm) = (0, 0);
    for it in &scene.items {
        match it {
            Item::Curve { sample, style } => {
                nc += 1;
                *curves_by_style.entry(style.clone()).or_insert(0) += 1;
                let st = styles.get(style).unwrap_or(&fallback);
                let id = sample.id.to_string();
                let mut pts = String::new();
                for (k, p) in sample.points.iter().enumerate() {
                    if k > 0 {
                        pts.push(' ');
                    }
                    let _ = write!(pts, "{:.3},{:.3}", tx(p.x_f64()), ty(p.y_f64()));
                    row(&mut csv, [&id, &format!("{:.6}", sample.t[k]), &format!("{:.12}", p.x_f64()), &format!("{:.12}", p.y_f64()), &format!("{:.3e}", p.err())]);
                }
                let _ = writeln!(
                    svg,
                    r#"<polyline id="{}" fill="none" stroke="{}" stroke-width="{}" points="{}"/>"#,
                    xml_escape(&id),
                    st.stroke,
                    st.width,
                    pts
                );
                if let (Some(a), Some(z)) = (sample.points.first(), sample.points.last()) {
                    endpoints.push((id, [a.x_f64(), a.y_f64(), z.x_f64(), z.y_f64()].map(|v| round_to(v, 6))));
                }
            }
            Item::Marker { label, point, style } => {
                nm += 1;
                let st = styles.get(style).unwrap_or(&fallback);
                let (x, y) = (tx(point.x_f64()), ty(point.y_f64()));
                let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{}"/>"#, x, y, st.stroke);
                let _ = writeln!(svg, r#"<text x="{:.3}" y="{:.3}" font-size="12">{}</text>"#, x + 5.0, y - 5.0, xml_escape(label));
                row(&mut csv, [label, "", &format!("{:.12}", point.x_f64()), &format!("{:.12}", point.y_f64()), &format!("{:.3e}", point.err())]);
            }
        }
    }
    svg.push_str("</svg>\n");
    let summary = FigureSummary {
        title: scene.title.clone(),
        curves: nc,
        markers: nm,
        curves_by_style,
        sets: scene.sets.clone(),
        endpoints,
        bbox: b.map(|v| round_to(v, 4)),
    };
    let csv = String::from_utf8(csv.into_inner().expect("in-memory writer")).expect("utf-8 fields");
    Figure { svg, csv, summary }
}

fn row(w: &mut csv::Writer<Vec<u8>>, fields: [&str; 5]) {
    w.write_record(fields).expect("in-memory writer");
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn shifted(c: &CurveSample, by: &PlanePoint, id: CurveId) -> CurveSample {
    CurveSample { id, t: c.t.clone(), points: c.points.iter().map(|p| p.add(by)).collect() }
}

/// The four boundary curves of the domain for `(g1^l, g2^l)` drawn in the
/// plane of `(g1, g2)`, with the lattice corners.
pub fn colmez_scene(basis: &PlaneBasis, l: i64, n_points: usize) -> Result<Scene> {
    let mut s = Scene::new("colmez domain");
    s.curve(basis.curve_sample(1, l, n_points, (0, 0))?, "blue");
    s.curve(basis.curve_sample(2, l, n_points, (0, 0))?, "blue");
    s.curve(basis.curve_sample(1, l, n_points, (0, l))?, "blue");
    s.curve(basis.curve_sample(2, l, n_points, (l, 0))?, "blue");
    let p = basis.bits();
    for (a, b) in [(0, 0), (l, 0), (0, l), (l, l)] {
        s.marker(&format!("({},{})", a, b), PlanePoint::exact(a, b, p), "black");
    }
    Ok(s)
}

/// Translates `u1^a u2^b D` over a block, in blue, against `pi^-1 D` in
/// red, all in the plane of `(u1, u2)`. Edge curves of `D` are sampled once
/// and moved by the additivity of the plane map.
pub fn cover_scene(title: &str, basis: &PlaneBasis, d: &ShintaniSet, block: (i64, i64), pi: &Element, n_points: usize) -> Result<Scene> {
    let mut s = Scene::new(title);
    let (edges, rays) = basis.set_outline("D", d, n_points)?;
    let p = basis.bits();
    for a in 0..=block.0 {
        for b in 0..=block.1 {
            let name = format!("T{}_{}", a, b);
            let by = PlanePoint::exact(a, b, p);
            for (i, e) in edges.iter().enumerate() {
                s.curve(shifted(e, &by, CurveId::Edge { set: name.clone(), index: i }), "blue");
            }
            for (i, r) in rays.iter().enumerate() {
                s.marker(&format!("{}_r{}", name, i), r.add(&by), "blue");
            }
            s.sets.insert(name, d.count_by_dim());
        }
    }
    let by = basis.phi(&pi.inv()?)?;
    for (i, e) in edges.iter().enumerate() {
        s.curve(shifted(e, &by, CurveId::Edge { set: "P".into(), index: i }), "red");
    }
    for (i, r) in rays.iter().enumerate() {
        s.marker(&format!("P_r{}", i), r.add(&by), "red");
    }
    s.sets.insert("P".into(), d.count_by_dim());
    Ok(s)
}
