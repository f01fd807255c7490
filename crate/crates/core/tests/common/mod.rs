//! Brute-force oracles shared by the integration tests. They work on raw
//! coordinates and recompute everything from distances, so they share no
//! code path with the library beyond the input data.

#![allow(dead_code)]

use holefill::bend::{BendLine, BendLineImage};
use holefill::BoundaryMapping64;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// First violated pair in lexicographic order: an edge whose image length
/// differs from its length, or a non-edge whose image is longer.
pub fn validate_oracle(vertices: &[[f64; 2]], images: &[Vec<f64>], rel: f64) -> Option<(&'static str, usize, usize)> {
    let n = vertices.len();
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&vertices[i], &vertices[j]);
            let f = dist(&images[i], &images[j]);
            let edge = j == i + 1 || (i == 0 && j == n - 1);
            let band = rel * d;
            if edge && (f - d).abs() > band {
                return Some(("EdgeNotCritical", i, j));
            }
            if !edge && f - d > band {
                return Some(("ExpansivePair", i, j));
            }
        }
    }
    None
}

pub fn raw(bm: &BoundaryMapping64) -> (Vec<[f64; 2]>, Vec<Vec<f64>>) {
    (bm.vertices().iter().map(|p| [p.x, p.y]).collect(), bm.images().iter().map(|q| q.coords.clone()).collect())
}

/// Signed gap `|p(t) - x|^2 - |q(t) - f(x)|^2` minimised over all vertices
/// but the bend vertex, evaluated from scratch. Squared so that vertices
/// the line passes through do not amplify rounding.
pub fn min_gap(bm: &BoundaryMapping64, line: &BendLine<f64>, image: &BendLineImage<f64>, t: f64) -> f64 {
    let v = bm.vertex(line.vertex);
    let p = [v.x + t * line.dir.x, v.y + t * line.dir.y];
    let q: Vec<f64> = image.origin.coords.iter().zip(&image.dir.coords).map(|(o, e)| o + t * e).collect();
    (0..bm.len())
        .filter(|&x| x != line.vertex)
        .map(|x| {
            let px = bm.vertex(x);
            dist(&p, &[px.x, px.y]).powi(2) - dist(&q, &bm.image(x).coords).powi(2)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Last parameter in `[0, length]` before some vertex gets closer in the
/// image than in the domain: scan a uniform grid, then bisect the first
/// sign change.
pub fn split_oracle(bm: &BoundaryMapping64, line: &BendLine<f64>, image: &BendLineImage<f64>, slack: f64) -> f64 {
    let steps = 2000;
    let feasible = |t: f64| min_gap(bm, line, image, t) >= -slack;
    let mut lo = 0.0;
    for k in 1..=steps {
        let t = line.length * k as f64 / steps as f64;
        if !feasible(t) {
            let mut hi = t;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
        lo = t;
    }
    line.length
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
