//! SVG crease drawings of the domain and OBJ export of the folded surface.

use std::collections::BTreeMap;
use std::fmt::Write;

use holefill::geom::{self, Point2};
use holefill::SolutionMesh64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Svg,
    Obj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Stroke {
    /// Faces and edges classed by whether the fold mirrors them (planar images only).
    Parity,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderStyle {
    pub format: Format,
    pub stroke: Stroke,
}

/// Decimal with nine significant digits, trailing zeros dropped.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// `true` when the face keeps its orientation in the image plane.
fn preserved(mesh: &SolutionMesh64, face: &[usize; 3]) -> bool {
    let img: Vec<Point2<f64>> =
        face.iter().map(|&k| Point2::new(mesh.vertices_image[k].coords[0], mesh.vertices_image[k].coords[1])).collect();
    geom::signed_area(&img) >= 0.0
}

pub fn svg(mesh: &SolutionMesh64, stroke: Stroke) -> String {
    let pts = &mesh.vertices_domain;
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let margin = 0.05 * (hi.x - lo.x).max(hi.y - lo.y);
    let (w, h) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);
    // y grows downward in SVG
    let at = |p: Point2<f64>| format!("{},{}", sig9(p.x - lo.x + margin), sig9(hi.y - p.y + margin));
    let parity = stroke == Stroke::Parity && mesh.dimension == 2;

    let mut edges: BTreeMap<(usize, usize), Vec<bool>> = BTreeMap::new();
    for f in &mesh.faces {
        let keep = preserved(mesh, f);
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(keep);
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        sig9(w),
        sig9(h)
    );
    let width = sig9(0.004 * w.max(h));
    let _ = writeln!(
        out,
        "<style>.preserved{{fill:#f4f1ea}} .reflected{{fill:#c9d7e8}} .face{{fill:#f4f1ea}} \
         line{{stroke-width:{width};stroke-linecap:round}} .mesh{{stroke:#9a9a9a}} .seam{{stroke:#c0392b}} \
         .boundary{{fill:none;stroke:#000;stroke-width:{width}}}</style>"
    );
    let _ = writeln!(out, r#"<g id="faces">"#);
    for f in &mesh.faces {
        let class = match (parity, preserved(mesh, f)) {
            (false, _) => "face",
            (true, true) => "preserved",
            (true, false) => "reflected",
        };
        let _ = writeln!(out, r#"<polygon class="{class}" points="{} {} {}"/>"#, at(pts[f[0]]), at(pts[f[1]]), at(pts[f[2]]));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="edges">"#);
    for ((a, b), sides) in &edges {
        if sides.len() < 2 {
            continue;
        }
        let class = if parity && sides.iter().any(|&s| s != sides[0]) { "seam" } else { "mesh" };
        let (p, q) = (pts[*a], pts[*b]);
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            sig9(p.x - lo.x + margin),
            sig9(hi.y - p.y + margin),
            sig9(q.x - lo.x + margin),
            sig9(hi.y - q.y + margin)
        );
    }
    let _ = writeln!(out, "</g>");
    let outline: Vec<String> = mesh.boundary_map.iter().map(|&k| at(pts[k])).collect();
    let _ = writeln!(out, r#"<polygon class="boundary" points="{}"/>"#, outline.join(" "));
    let _ = writeln!(out, "</svg>");
    out
}

/// Image vertices and faces; callers make sure the image is 3-dimensional.
pub fn obj(mesh: &SolutionMesh64) -> String {
    let mut out = String::new();
    for q in &mesh.vertices_image {
        let c = &q.coords;
        let _ = writeln!(out, "v {} {} {}", c[0], c[1], c[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(0.5), "0.5");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(123.456789012), "123.456789");
        assert_eq!(sig9(-0.000123456789012), "-0.000123456789");
        assert_eq!(sig9(2.5e-12), "0.0000000000025");
        assert_eq!(sig9(0.0), "0");
    }
}
