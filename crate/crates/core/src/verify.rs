//! Independent acceptance check for a filled mesh, plus a randomized check
//! of the crossing-segment lemma that the whole construction rests on.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{self, Location, Point2, PointD};
use crate::model::BoundaryMapping;
use crate::solver::{SolutionMesh, TriangleMap};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("point lies outside the mesh")]
    OutsideDomain,
    #[error("malformed mesh: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub pass: bool,
    /// Largest residual seen, in length units (or area for coverage).
    pub worst: f64,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(worst: f64, failures: usize, tol: f64) -> Self {
        CheckResult { pass: failures == 0 && worst <= tol, worst, failures, note: None }
    }

    fn skipped() -> Self {
        CheckResult { pass: false, worst: f64::NAN, failures: 0, note: Some("skipped: malformed mesh".into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub tol: f64,
    pub samples: usize,
    pub structural: Vec<String>,
    pub congruence: CheckResult,
    pub continuity: CheckResult,
    pub coverage: CheckResult,
    pub boundary: CheckResult,
    pub nonexpansive: CheckResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions<T> {
    /// Absolute tolerance; `None` means `1e-7` times the polygon diameter.
    pub tol: Option<T>,
    pub samples: usize,
    pub seed: u64,
}

impl<T> Default for VerifyOptions<T> {
    fn default() -> Self {
        VerifyOptions { tol: None, samples: 1000, seed: 0 }
    }
}

pub fn default_verify_tol<T: Scalar>(bm: &BoundaryMapping<T>) -> T {
    T::lit(1e-7) * bm.diameter()
}

fn structural_problems<T: Scalar>(bm: &BoundaryMapping<T>, mesh: &SolutionMesh<T>) -> Vec<String> {
    let mut out = Vec::new();
    let nv = mesh.vertices_domain.len();
    if mesh.vertices_image.len() != nv {
        out.push(format!("{} domain vertices but {} image vertices", nv, mesh.vertices_image.len()));
        return out;
    }
    if mesh.dimension != bm.dimension() {
        out.push(format!("mesh dimension {} differs from instance dimension {}", mesh.dimension, bm.dimension()));
    }
    if let Some(k) = mesh.vertices_image.iter().position(|q| q.dim() != bm.dimension()) {
        out.push(format!("image vertex {k} has dimension {}", mesh.vertices_image[k].dim()));
    }
    if mesh.boundary_map.len() != bm.len() {
        out.push(format!("boundary map has {} entries for {} vertices", mesh.boundary_map.len(), bm.len()));
    }
    if let Some(k) = mesh.boundary_map.iter().position(|&m| m >= nv) {
        out.push(format!("boundary map entry {k} out of range"));
    }
    if mesh.faces.is_empty() {
        out.push("no faces".into());
    }
    for (fi, f) in mesh.faces.iter().enumerate() {
        if f.iter().any(|&k| k >= nv) {
            out.push(format!("face {fi} references a missing vertex"));
            continue;
        }
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            out.push(format!("face {fi} repeats a vertex"));
            continue;
        }
        let tri = f.map(|k| mesh.vertices_domain[k]);
        if geom::signed_area(&tri) <= T::zero() {
            out.push(format!("face {fi} is degenerate or clockwise"));
        }
    }
    out
}

/// Face lookup and barycentric evaluation of the piecewise-affine map.
pub struct MeshEvaluator<'a, T> {
    mesh: &'a SolutionMesh<T>,
    maps: Vec<TriangleMap<T>>,
}

impl<'a, T: Scalar> MeshEvaluator<'a, T> {
    pub fn new(mesh: &'a SolutionMesh<T>) -> Result<Self, VerifyError> {
        let maps = mesh
            .faces
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                if f.iter().any(|&k| k >= mesh.vertices_domain.len() || k >= mesh.vertices_image.len()) {
                    return Err(VerifyError::Malformed(format!("face {fi} references a missing vertex")));
                }
                let tri = f.map(|k| mesh.vertices_domain[k]);
                let img = [&mesh.vertices_image[f[0]], &mesh.vertices_image[f[1]], &mesh.vertices_image[f[2]]];
                TriangleMap::affine(tri, img).ok_or_else(|| VerifyError::Malformed(format!("face {fi} is degenerate")))
            })
            .collect::<Result<_, _>>()?;
        Ok(MeshEvaluator { mesh, maps })
    }

    /// Smallest signed distance from `p` to the three edge lines of a face
    /// (positive inside).
    pub fn depth(&self, face: usize, p: Point2<T>) -> T {
        let f = self.mesh.faces[face];
        (0..3)
            .map(|e| {
                let a = self.mesh.vertices_domain[f[e]];
                let b = self.mesh.vertices_domain[f[(e + 1) % 3]];
                (b - a).cross(p - a) / a.dist(b)
            })
            .fold(T::infinity(), T::min)
    }

    /// Face containing `p`, preferring the one it lies deepest in.
    pub fn locate(&self, p: Point2<T>, band: T) -> Option<usize> {
        let mut best: Option<(T, usize)> = None;
        for fi in 0..self.maps.len() {
            let d = self.depth(fi, p);
            if d >= -band && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, fi));
            }
        }
        best.map(|(_, fi)| fi)
    }

    pub fn evaluate(&self, p: Point2<T>, band: T) -> Result<PointD<T>, VerifyError> {
        let fi = self.locate(p, band).ok_or(VerifyError::OutsideDomain)?;
        Ok(self.maps[fi].apply(p))
    }
}

/// Image of domain point `p` under the mesh map.
pub fn evaluate<T: Scalar>(mesh: &SolutionMesh<T>, p: Point2<T>) -> Result<PointD<T>, VerifyError> {
    let diam = geom::bbox_diameter(&mesh.vertices_domain);
    MeshEvaluator::new(mesh)?.evaluate(p, T::lit(1e-9) * diam)
}

fn random_interior<T: Scalar>(bm: &BoundaryMapping<T>, rng: &mut impl Rng, band: T) -> Option<Point2<T>> {
    let poly = bm.vertices();
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for q in poly {
        lo = Point2::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Point2::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    (0..1000).find_map(|_| {
        let p = Point2::new(lo.x + (hi.x - lo.x) * T::lit(rng.gen()), lo.y + (hi.y - lo.y) * T::lit(rng.gen()));
        (geom::locate(poly, p, band) == Location::Inside).then_some(p)
    })
}

fn check_congruence<T: Scalar>(mesh: &SolutionMesh<T>, tol: T) -> CheckResult {
    let mut worst = T::zero();
    let mut failures = 0;
    for f in &mesh.faces {
        for e in 0..3 {
            let (a, b) = (f[e], f[(e + 1) % 3]);
            let r = (mesh.vertices_domain[a].dist(mesh.vertices_domain[b]) - mesh.vertices_image[a].dist(&mesh.vertices_image[b])).abs();
            worst = worst.max(r);
            failures += usize::from(r > tol);
        }
    }
    CheckResult::new(worst.as_f64(), failures, tol.as_f64())
}

fn check_continuity<T: Scalar>(bm: &BoundaryMapping<T>, mesh: &SolutionMesh<T>, tol: T, band: T) -> CheckResult {
    let mut edges: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
    for f in &mesh.faces {
        for e in 0..3 {
            let (a, b) = (f[e], f[(e + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(a < b);
        }
    }
    let mut failures = 0;
    let mut notes = Vec::new();
    let mut keys: Vec<_> = edges.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let dirs = &edges[&key];
        let ok = match dirs.as_slice() {
            [_] => {
                let mid = mesh.vertices_domain[key.0].lerp(mesh.vertices_domain[key.1], T::lit(0.5));
                geom::locate(bm.vertices(), mid, band) == Location::Boundary
            }
            [x, y] => x != y,
            _ => false,
        };
        if !ok {
            failures += 1;
            if notes.len() < 5 {
                notes.push(format!("edge {key:?} used by {} face(s)", dirs.len()));
            }
        }
    }
    // distinct mesh vertices must not share a domain position
    let mut used: Vec<usize> = mesh.faces.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    used.sort_by(|&a, &b| {
        let (pa, pb) = (mesh.vertices_domain[a], mesh.vertices_domain[b]);
        pa.x.partial_cmp(&pb.x).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut worst = T::zero();
    for (k, &a) in used.iter().enumerate() {
        for &b in &used[k + 1..] {
            let (pa, pb) = (mesh.vertices_domain[a], mesh.vertices_domain[b]);
            if pb.x - pa.x > band {
                break;
            }
            if pa.dist(pb) <= band {
                worst = worst.max(mesh.vertices_image[a].dist(&mesh.vertices_image[b]));
                failures += 1;
                if notes.len() < 5 {
                    notes.push(format!("vertices {a} and {b} coincide"));
                }
            }
        }
    }
    let mut r = CheckResult::new(worst.as_f64(), failures, tol.as_f64());
    if !notes.is_empty() {
        r.note = Some(notes.join("; "));
    }
    r
}

fn check_coverage<T: Scalar>(
    bm: &BoundaryMapping<T>,
    mesh: &SolutionMesh<T>,
    eval: &MeshEvaluator<'_, T>,
    tol: T,
    samples: usize,
    rng: &mut impl Rng,
) -> CheckResult {
    let band = tol;
    let faces_area: T = mesh.faces.iter().map(|f| geom::signed_area(&f.map(|k| mesh.vertices_domain[k]))).sum();
    let area_gap = (faces_area - bm.area()).abs();
    let area_tol = tol * bm.diameter();
    let mut failures = usize::from(area_gap > area_tol);
    let mut notes = Vec::new();
    let mut drawn = 0;
    for _ in 0..samples * 4 {
        if drawn == samples {
            break;
        }
        let Some(p) = random_interior(bm, rng, band) else { break };
        let depths: Vec<T> = (0..mesh.faces.len()).map(|fi| eval.depth(fi, p)).collect();
        if depths.iter().any(|d| d.abs() <= band) {
            continue;
        }
        drawn += 1;
        let inside = depths.iter().filter(|&&d| d > band).count();
        if inside != 1 {
            failures += 1;
            if notes.len() < 5 {
                notes.push(format!("point ({}, {}) lies in {inside} faces", p.x, p.y));
            }
        }
    }
    let mut r = CheckResult::new(area_gap.as_f64(), failures, area_tol.as_f64());
    if !notes.is_empty() {
        r.note = Some(notes.join("; "));
    }
    r
}

fn check_boundary<T: Scalar>(bm: &BoundaryMapping<T>, mesh: &SolutionMesh<T>, eval: &MeshEvaluator<'_, T>, tol: T) -> CheckResult {
    let mut worst = T::zero();
    let mut failures = 0;
    for k in 0..bm.len() {
        let m = mesh.boundary_map[bm.input_index(k)];
        let r = mesh.vertices_domain[m].dist(bm.vertex(k)).max(mesh.vertices_image[m].dist(bm.image(k)));
        worst = worst.max(r);
        failures += usize::from(r > tol);
    }
    let half = T::lit(0.5);
    for k in 0..bm.len() {
        let mid = bm.vertex(k).lerp(bm.vertex(bm.next(k)), half);
        match eval.evaluate(mid, tol) {
            Ok(g) => {
                let r = g.dist(&bm.edge_image(k, half));
                worst = worst.max(r);
                failures += usize::from(r > tol);
            }
            Err(_) => failures += 1,
        }
    }
    CheckResult::new(worst.as_f64(), failures, tol.as_f64())
}

fn check_nonexpansive<T: Scalar>(
    bm: &BoundaryMapping<T>,
    eval: &MeshEvaluator<'_, T>,
    tol: T,
    samples: usize,
    rng: &mut impl Rng,
) -> CheckResult {
    let mut worst = T::zero();
    let mut failures = 0;
    let mut checked = 0;
    for _ in 0..samples * 4 {
        if checked == samples {
            break;
        }
        let (Some(a), Some(b)) = (random_interior(bm, rng, tol), random_interior(bm, rng, tol)) else { break };
        if !geom::visible(bm.vertices(), a, b, tol) {
            continue;
        }
        let (Ok(ga), Ok(gb)) = (eval.evaluate(a, tol), eval.evaluate(b, tol)) else {
            failures += 1;
            continue;
        };
        checked += 1;
        let excess = ga.dist(&gb) - a.dist(b);
        worst = worst.max(excess);
        failures += usize::from(excess > tol);
    }
    let mut r = CheckResult::new(worst.as_f64(), failures, tol.as_f64());
    r.note = Some(format!("{checked} mutually visible pairs"));
    r
}

/// Checks a mesh against an instance: face congruence, continuity across
/// shared edges, coverage, boundary agreement and sampled nonexpansiveness.
pub fn verify<T: Scalar>(bm: &BoundaryMapping<T>, mesh: &SolutionMesh<T>, opts: &VerifyOptions<T>) -> VerifyReport {
    let tol = opts.tol.unwrap_or_else(|| default_verify_tol(bm));
    let structural = structural_problems(bm, mesh);
    let eval = if structural.is_empty() { MeshEvaluator::new(mesh).ok() } else { None };
    let Some(eval) = eval else {
        return VerifyReport {
            pass: false,
            tol: tol.as_f64(),
            samples: opts.samples,
            structural,
            congruence: CheckResult::skipped(),
            continuity: CheckResult::skipped(),
            coverage: CheckResult::skipped(),
            boundary: CheckResult::skipped(),
            nonexpansive: CheckResult::skipped(),
        };
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let congruence = check_congruence(mesh, tol);
    let continuity = check_continuity(bm, mesh, tol, tol * T::lit(1e-3));
    let coverage = check_coverage(bm, mesh, &eval, tol, opts.samples, &mut rng);
    let boundary = check_boundary(bm, mesh, &eval, tol);
    let nonexpansive = check_nonexpansive(bm, &eval, tol, opts.samples, &mut rng);
    let pass = [&congruence, &continuity, &coverage, &boundary, &nonexpansive].iter().all(|c| c.pass);
    VerifyReport {
        pass,
        tol: tol.as_f64(),
        samples: opts.samples,
        structural,
        congruence,
        continuity,
        coverage,
        boundary,
        nonexpansive,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub trials: usize,
    /// Trials meeting the premise of part (a) / part (b).
    pub checked_a: usize,
    pub checked_b: usize,
    /// Part (b) trials where `{p, q}` came out critical.
    pub checked_b_critical: usize,
    /// Trials with non-crossing segments (no assertion).
    pub controls: usize,
    pub violations: usize,
    pub worst: f64,
}

/// Rigid motion of the plane into `R^d` followed by nothing else.
struct Embedding {
    frame: [Vec<f64>; 2],
    offset: Vec<f64>,
}

impl Embedding {
    fn random(d: usize, rng: &mut impl Rng) -> Self {
        let mut gauss = || -> Vec<f64> { (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect() };
        let a = gauss();
        let b = gauss();
        let offset = gauss();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
        let ab: f64 = b.iter().zip(&e1).map(|(x, y)| x * y).sum();
        let r: Vec<f64> = b.iter().zip(&e1).map(|(x, y)| x - ab * y).collect();
        let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e2 = r.iter().map(|x| x / nr).collect();
        Embedding { frame: [e1, e2], offset }
    }

    fn map(&self, p: (f64, f64, f64), normal: &[f64]) -> PointD<f64> {
        PointD::new(
            (0..self.offset.len())
                .map(|k| self.offset[k] + p.0 * self.frame[0][k] + p.1 * self.frame[1][k] + p.2 * normal[k])
                .collect(),
        )
    }
}

/// Randomized check of the crossing-segment lemma: for `p, q, u, v` with
/// segment `pq` crossing `uv`,
/// (a) `{q,u,v}` critical and `{p,u,v}` nonexpansive imply `{p,q}` nonexpansive;
/// (b) `{u,v}` critical with `{p,u,v}` and `{q,u,v}` nonexpansive imply the
/// same, and if `{p,q}` is critical then so are all six pairs.
/// Images come from folding the plane along a random line (flat or by a
/// dihedral angle) and embedding it rigidly, so premises hold by
/// construction whenever the relevant points share a side of the crease.
pub fn property_suite(seed: u64, trials: usize) -> PropertyReport {
    let mut report = PropertyReport {
        trials,
        checked_a: 0,
        checked_b: 0,
        checked_b_critical: 0,
        controls: 0,
        violations: 0,
        worst: 0.0,
    };
    let tol = 1e-9;
    let crit = 1e-12;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut pt = || Point2::new(rng.gen::<f64>(), rng.gen::<f64>());
        let (p, q, u, v) = (pt(), pt(), pt(), pt());
        let (c, dir) = (pt(), pt());
        let dims = 2 + usize::from(rng.gen_bool(0.5));
        let crosses = geom::segments_cross((p, q), (u, v), 0.0);
        if !crosses || (u - p).cross(v - p).abs() < 1e-6 {
            report.controls += 1;
            continue;
        }
        // crease through c; points with positive side value move
        let Some(n) = Point2::new(dir.x - 0.5, dir.y - 0.5).normalized() else { continue };
        let alpha = if dims == 2 { std::f64::consts::PI } else { rng.gen_range(0.05..std::f64::consts::PI) };
        let emb = Embedding::random(dims, &mut rng);
        let normal: Vec<f64> = if dims == 3 {
            let (a, b) = (&emb.frame[0], &emb.frame[1]);
            vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        } else {
            vec![0.0; 2]
        };
        let side = |x: Point2<f64>| (x - c).cross(n);
        let img = |x: Point2<f64>| -> PointD<f64> {
            let s = side(x);
            let along = c + n * (x - c).dot(n);
            let perp = Point2::new(n.y, -n.x);
            if s <= 0.0 {
                emb.map((x.x, x.y, 0.0), &normal)
            } else {
                let (r, h) = (s * alpha.cos(), s * alpha.sin());
                let base = along + perp * r;
                emb.map((base.x, base.y, h), &normal)
            }
        };
        let (fp, fq, fu, fv) = (img(p), img(q), img(u), img(v));
        let gap = |a: Point2<f64>, b: Point2<f64>, fa: &PointD<f64>, fb: &PointD<f64>| fa.dist(fb) - a.dist(b);
        let is_crit = |g: f64| g.abs() <= crit;
        let same_side = |xs: &[Point2<f64>]| xs.iter().all(|&x| side(x) <= 0.0) || xs.iter().all(|&x| side(x) > 0.0);
        let pq_gap = gap(p, q, &fp, &fq);
        let record = |r: f64, rep: &mut PropertyReport| {
            rep.worst = rep.worst.max(r);
            rep.violations += usize::from(r > tol);
        };
        if same_side(&[q, u, v]) {
            report.checked_a += 1;
            record(pq_gap, &mut report);
        }
        if same_side(&[u, v]) {
            report.checked_b += 1;
            record(pq_gap, &mut report);
            if is_crit(pq_gap) {
                report.checked_b_critical += 1;
                let pts = [(p, &fp), (q, &fq), (u, &fu), (v, &fv)];
                for i in 0..4 {
                    for j in i + 1..4 {
                        record(gap(pts[i].0, pts[j].0, pts[i].1, pts[j].1).abs(), &mut report);
                    }
                }
            }
        }
    }
    report
}
