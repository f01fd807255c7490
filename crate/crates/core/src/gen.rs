//! Valid instances built by folding a flat polygon forward.
//!
//! In the plane a step reflects the current image across a line of the
//! image plane. In space a step cuts the polygon along a chord of the
//! domain and turns one side about the chord's image. Boundary edges are
//! subdivided wherever a crease meets them so every edge still maps to a
//! straight segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Point2, PointD};
use crate::model::{BoundaryMapping, ModelError};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("base polygon is not simple")]
    NotSimple,
    #[error("dihedral folds need dimension at least 3, got {0}")]
    KindNotAvailable(usize),
    #[error("fold step {0} would create a crease too close to a vertex or earlier crease")]
    Rejected(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldKind<T> {
    /// Flat fold.
    Reflection,
    /// Turn by this angle in `(0, π)` about the crease image.
    Dihedral(T),
}

/// A crease line `point + s * dir`; the half-plane on `side` of `dir` moves.
/// Reflections in dimension 2 act on the image plane; everything else acts
/// on the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldStep<T> {
    pub point: Point2<T>,
    pub dir: Point2<T>,
    pub side: Side,
    pub kind: FoldKind<T>,
}

impl<T: Scalar> FoldStep<T> {
    fn signed(&self, x: Point2<T>) -> T {
        self.dir.cross(x - self.point)
    }

    fn moves(&self, s: T) -> bool {
        match self.side {
            Side::Left => s > T::zero(),
            Side::Right => s < T::zero(),
        }
    }
}

struct State<T> {
    verts: Vec<Point2<T>>,
    imgs: Vec<PointD<T>>,
    chords: Vec<(Point2<T>, Point2<T>)>,
    min_gap: T,
}

enum Outcome {
    Applied,
    Missed,
}

fn cross3<T: Scalar>(a: &PointD<T>, b: &PointD<T>) -> PointD<T> {
    let mut out = PointD::zeros(a.dim());
    let (a, b, c) = (&a.coords, &b.coords, &mut out.coords);
    c[0] = a[1] * b[2] - a[2] * b[1];
    c[1] = a[2] * b[0] - a[0] * b[2];
    c[2] = a[0] * b[1] - a[1] * b[0];
    out
}

/// Inserts vertices where the sign of `side_of` changes strictly along an
/// edge. Returns `None` if a new vertex would land within `min_gap` of an
/// edge endpoint, otherwise the indices of the inserted vertices.
fn subdivide<T: Scalar>(state: &mut State<T>, side: &[T]) -> Option<Vec<usize>> {
    let n = state.verts.len();
    let mut verts = Vec::with_capacity(n + 4);
    let mut imgs = Vec::with_capacity(n + 4);
    let mut inserted = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        verts.push(state.verts[k]);
        imgs.push(state.imgs[k].clone());
        let (sa, sb) = (side[k], side[k1]);
        if (sa > T::zero() && sb < T::zero()) || (sa < T::zero() && sb > T::zero()) {
            let lambda = sa / (sa - sb);
            let (a, b) = (state.verts[k], state.verts[k1]);
            let len = a.dist(b);
            if lambda * len < state.min_gap || (T::one() - lambda) * len < state.min_gap {
                return None;
            }
            inserted.push(verts.len());
            verts.push(a.lerp(b, lambda));
            imgs.push(state.imgs[k].lerp(&state.imgs[k1], lambda));
        }
    }
    state.verts = verts;
    state.imgs = imgs;
    Some(inserted)
}

fn reflect_in_image_plane<T: Scalar>(state: &mut State<T>, step: &FoldStep<T>) -> Option<Outcome> {
    let dir = step.dir.normalized()?;
    let step = FoldStep { dir, ..*step };
    let flat = |q: &PointD<T>| Point2::new(q.coords[0], q.coords[1]);
    let side: Vec<T> = state.imgs.iter().map(|q| step.signed(flat(q))).collect();
    if side.iter().any(|s| s.abs() < state.min_gap) {
        return None;
    }
    if !side.iter().any(|&s| step.moves(s)) {
        return Some(Outcome::Missed);
    }
    subdivide(state, &side)?;
    let normal = Point2::new(-dir.y, dir.x);
    for q in &mut state.imgs {
        let s = step.signed(flat(q));
        if step.moves(s) {
            let r = flat(q) - normal * (s + s);
            q.coords[0] = r.x;
            q.coords[1] = r.y;
        }
    }
    Some(Outcome::Applied)
}

fn turn_about_chord<T: Scalar>(state: &mut State<T>, step: &FoldStep<T>, angle: T) -> Option<Outcome> {
    let dir = step.dir.normalized()?;
    let step = FoldStep { dir, ..*step };
    let side: Vec<T> = state.verts.iter().map(|&x| step.signed(x)).collect();
    if side.iter().any(|s| s.abs() < state.min_gap) {
        return None;
    }
    let moving = side.iter().filter(|&&s| step.moves(s)).count();
    if moving == 0 || moving == side.len() {
        return Some(Outcome::Missed);
    }
    let inserted = subdivide(state, &side)?;
    let [i1, i2] = inserted[..] else { return None };
    let (c1, c2) = (state.verts[i1], state.verts[i2]);
    let band = state.min_gap;
    if state.chords.iter().any(|&(a, b)| geom::segments_cross((c1, c2), (a, b), band)) {
        return None;
    }
    let n = state.verts.len();
    // a moving vertex next to c1 fixes the local frame of the region cut
    let w = [(i1 + 1) % n, (i1 + n - 1) % n].into_iter().find(|&k| step.moves(step.signed(state.verts[k])))?;
    let (d1, d2) = (c2 - c1, state.verts[w] - c1);
    let det = d1.cross(d2);
    let f1 = state.imgs[i1].clone();
    let (g1, g2) = (state.imgs[i2].sub(&f1), state.imgs[w].sub(&f1));
    // columns of R with R d1 = g1, R d2 = g2
    let col = |ex: T, ey: T| g1.scale(ex).add_scaled(&g2, ey);
    let r_x = col(d2.y / det, -d1.y / det);
    let r_y = col(-d2.x / det, d1.x / det);
    let m = match step.side {
        Side::Left => Point2::new(-dir.y, dir.x),
        Side::Right => Point2::new(dir.y, -dir.x),
    };
    let rm = r_x.scale(m.x).add_scaled(&r_y, m.y);
    let sheet = cross3(&r_x, &r_y).normalized()?;
    let axis = cross3(&rm, &sheet).normalized()?;
    let (cos, sin) = (angle.cos(), angle.sin());
    for k in 0..n {
        if k == i1 || k == i2 || !step.moves(step.signed(state.verts[k])) {
            continue;
        }
        let r = state.imgs[k].sub(&f1);
        let turned = r.scale(cos).add_scaled(&cross3(&axis, &r), sin).add_scaled(&axis, axis.dot(&r) * (T::one() - cos));
        state.imgs[k] = f1.add(&turned);
    }
    state.chords.push((c1, c2));
    Some(Outcome::Applied)
}

fn apply<T: Scalar>(state: &mut State<T>, step: &FoldStep<T>, dimension: usize) -> Result<Option<Outcome>, GenError> {
    Ok(match (dimension, step.kind) {
        (2, FoldKind::Reflection) => reflect_in_image_plane(state, step),
        (2, FoldKind::Dihedral(_)) => return Err(GenError::KindNotAvailable(2)),
        (_, FoldKind::Reflection) => turn_about_chord(state, step, T::PI()),
        (_, FoldKind::Dihedral(a)) => turn_about_chord(state, step, a),
    })
}

fn start<T: Scalar>(base: &[Point2<T>], dimension: usize) -> Result<State<T>, GenError> {
    if base.len() < 3 {
        return Err(ModelError::TooFewVertices(base.len()).into());
    }
    let mut verts = base.to_vec();
    if geom::signed_area(&verts) < T::zero() {
        verts[1..].reverse();
    }
    let diam = geom::bbox_diameter(&verts);
    if geom::simplicity_violation(&verts, T::lit(1e-12) * diam).is_some() {
        return Err(GenError::NotSimple);
    }
    let imgs = verts.iter().map(|&p| PointD::embed(p, dimension.max(2))).collect();
    Ok(State { verts, imgs, chords: Vec::new(), min_gap: T::lit(1e-3) * diam })
}

/// Folds `base` by each step in turn. A step whose crease misses the
/// polygon is skipped with a warning.
pub fn generate<T: Scalar>(base: &[Point2<T>], steps: &[FoldStep<T>], dimension: usize) -> Result<BoundaryMapping<T>, GenError> {
    let mut state = start(base, dimension)?;
    for (k, step) in steps.iter().enumerate() {
        match apply(&mut state, step, dimension)? {
            Some(Outcome::Applied) => {}
            Some(Outcome::Missed) => log::warn!("fold step {k} misses the polygon; skipped"),
            None => return Err(GenError::Rejected(k)),
        }
    }
    Ok(BoundaryMapping::new(dimension, state.verts, state.imgs)?)
}

/// Outline of the unfolded paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseShape {
    /// Convex or star-shaped, decided per attempt.
    #[default]
    Random,
    Convex,
    Star,
    /// Square with its corners on the unit axes.
    Square,
}

impl std::str::FromStr for BaseShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(BaseShape::Random),
            "convex" => Ok(BaseShape::Convex),
            "star" => Ok(BaseShape::Star),
            "square" => Ok(BaseShape::Square),
            other => Err(format!("unknown shape '{other}'")),
        }
    }
}

/// Knobs for [`random_instance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    pub folds: usize,
    pub dimension: usize,
    pub shape: BaseShape,
    /// Exact base vertex count; `None` draws one from 8..=32.
    pub base_vertices: Option<usize>,
    /// Largest accepted vertex count after subdivision.
    pub max_vertices: usize,
}

impl RandomConfig {
    pub fn new(folds: usize, dimension: usize) -> Self {
        RandomConfig { folds, dimension, shape: BaseShape::Random, base_vertices: None, max_vertices: 40 }
    }
}

/// Star-shaped polygon around the origin; `jitter = 0` gives a convex one.
pub fn random_base<T: Scalar>(n: usize, jitter: f64, rng: &mut impl Rng) -> Vec<Point2<T>> {
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = gaps.iter().sum();
    let mut angle = rng.gen_range(0.0..std::f64::consts::TAU);
    gaps.iter()
        .map(|g| {
            angle += g / total * std::f64::consts::TAU;
            let r = 1.0 - jitter * rng.gen::<f64>();
            Point2::new(T::lit(r * angle.cos()), T::lit(r * angle.sin()))
        })
        .collect()
}

fn random_step<T: Scalar>(state: &State<T>, dimension: usize, rng: &mut impl Rng) -> FoldStep<T> {
    let pts: Vec<Point2<T>> = if dimension == 2 {
        state.imgs.iter().map(|q| Point2::new(q.coords[0], q.coords[1])).collect()
    } else {
        state.verts.clone()
    };
    // a point inside the convex hull: random convex combination of three vertices
    let picks: Vec<usize> = (0..3).map(|_| rng.gen_range(0..pts.len())).collect();
    let mut w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 0.05).collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    let point = picks.iter().zip(&w).fold(Point2::default(), |acc, (&k, &wk)| acc + pts[k] * T::lit(wk));
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let dir = Point2::new(T::lit(theta.cos()), T::lit(theta.sin()));
    let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
    let kind = if dimension == 2 || rng.gen_bool(0.2) {
        FoldKind::Reflection
    } else {
        FoldKind::Dihedral(T::lit(rng.gen_range(0.3..std::f64::consts::PI - 0.3)))
    };
    FoldStep { point, dir, side, kind }
}

/// Random valid instance following `cfg`; deterministic per seed.
pub fn random_instance_with<T: Scalar>(cfg: &RandomConfig, seed: u64) -> Result<BoundaryMapping<T>, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dimension = cfg.dimension.max(2);
    let mut last = GenError::Rejected(0);
    for _ in 0..200 {
        let base = match cfg.shape {
            BaseShape::Square => [(1., 0.), (0., 1.), (-1., 0.), (0., -1.)]
                .iter()
                .map(|&(x, y)| Point2::new(T::lit(x), T::lit(y)))
                .collect(),
            shape => {
                let n = cfg.base_vertices.unwrap_or_else(|| rng.gen_range(8..=32));
                let star = match shape {
                    BaseShape::Convex => false,
                    BaseShape::Star => true,
                    _ => !rng.gen_bool(0.5),
                };
                let jitter = if star { rng.gen_range(0.05..0.35) } else { 0.0 };
                random_base::<T>(n, jitter, &mut rng)
            }
        };
        let n = base.len();
        let mut state = start(&base, dimension)?;
        let mut applied = 0;
        for _ in 0..cfg.folds * 50 {
            if applied == cfg.folds {
                break;
            }
            let step = random_step(&state, dimension, &mut rng);
            let backup = (state.verts.clone(), state.imgs.clone(), state.chords.len());
            match apply(&mut state, &step, dimension)? {
                Some(Outcome::Applied) => applied += 1,
                _ => {
                    (state.verts, state.imgs) = (backup.0, backup.1);
                    state.chords.truncate(backup.2);
                }
            }
        }
        if state.verts.len() > cfg.max_vertices.max(n) {
            continue;
        }
        let bm = BoundaryMapping::new(dimension, state.verts, state.imgs)?;
        match bm.validate(&bm.default_tolerance()) {
            Ok(()) => return Ok(bm),
            Err(v) => {
                log::debug!("generated instance rejected: {v}");
                last = GenError::Rejected(cfg.folds);
            }
        }
    }
    Err(last)
}

/// Random valid instance with `n_folds` folds in dimension `d`.
pub fn random_instance<T: Scalar>(n_folds: usize, d: usize, seed: u64) -> BoundaryMapping<T> {
    random_instance_with(&RandomConfig::new(n_folds, d), seed).expect("random instance generation converges")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn square() -> Vec<Point2<f64>> {
        vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.), Point2::new(0., 1.)]
    }

    fn vertical(kind: FoldKind<f64>) -> FoldStep<f64> {
        FoldStep { point: Point2::new(0.5, 0.0), dir: Point2::new(0.0, 1.0), side: Side::Right, kind }
    }

    fn close(a: &BoundaryMapping<f64>, b: &BoundaryMapping<f64>) -> bool {
        a.len() == b.len()
            && (0..a.len()).all(|k| a.vertex(k).dist(b.vertex(k)) < 1e-12 && a.image(k).dist(b.image(k)) < 1e-12)
    }

    #[test]
    fn reflection_gives_flat_fold() {
        let bm = generate(&square(), &[vertical(FoldKind::Reflection)], 2).unwrap();
        assert!(close(&bm, &corpus::fold()));
    }

    #[test]
    fn dihedral_gives_right_angle_fold() {
        let bm = generate(&square(), &[vertical(FoldKind::Dihedral(std::f64::consts::FRAC_PI_2))], 3).unwrap();
        assert!(close(&bm, &corpus::dihedral()));
    }

    #[test]
    fn no_steps_is_identity() {
        let bm = generate::<f64>(&square(), &[], 2).unwrap();
        assert!(close(&bm, &corpus::identity()));
    }

    #[test]
    fn missing_line_is_skipped() {
        let step = FoldStep { point: Point2::new(5.0, 0.0), ..vertical(FoldKind::Reflection) };
        let bm = generate(&square(), &[step], 2).unwrap();
        assert_eq!(bm.len(), 4);
        assert!(matches!(generate(&square(), &[vertical(FoldKind::Dihedral(1.0))], 2), Err(GenError::KindNotAvailable(2))));
    }

    #[test]
    fn random_instances_validate_and_repeat() {
        for d in [2, 3] {
            for seed in 0..20 {
                let a = random_instance::<f64>(3, d, seed);
                assert!(a.validate(&a.default_tolerance()).is_ok());
                assert!((8..=40).contains(&a.len()));
                assert_eq!(a, random_instance::<f64>(3, d, seed));
            }
        }
    }

    #[test]
    fn every_shape_generates() {
        for shape in ["random", "convex", "star", "square"] {
            for d in [2, 3] {
                let cfg = RandomConfig { shape: shape.parse().unwrap(), ..RandomConfig::new(2, d) };
                let bm = random_instance_with::<f64>(&cfg, 1).unwrap();
                assert!(bm.validate(&bm.default_tolerance()).is_ok(), "{shape} d={d}");
            }
        }
        assert!("round".parse::<BaseShape>().is_err());
    }

    #[test]
    fn planar_composition_matches_pointwise_reflections() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = random_base::<f64>(12, 0.0, &mut rng);
        let steps: Vec<FoldStep<f64>> = (0..3)
            .map(|k| FoldStep {
                point: Point2::new(0.1 * k as f64, -0.2),
                dir: Point2::new((0.7 * k as f64 + 0.3).cos(), (0.7 * k as f64 + 0.3).sin()),
                side: if k % 2 == 0 { Side::Left } else { Side::Right },
                kind: FoldKind::Reflection,
            })
            .collect();
        let bm = generate(&base, &steps, 2).unwrap();
        let pointwise = |mut x: Point2<f64>| {
            for s in &steps {
                let d = s.dir.normalized().unwrap();
                let side = d.cross(x - s.point);
                if s.moves(side) {
                    x = x - Point2::new(-d.y, d.x) * (2.0 * side);
                }
            }
            x
        };
        for _ in 0..1000 {
            let k = rng.gen_range(0..bm.len());
            let t: f64 = rng.gen();
            let p = bm.vertex(k).lerp(bm.vertex(bm.next(k)), t);
            let q = bm.edge_image(k, t);
            let r = pointwise(p);
            assert!(Point2::new(q.coords[0], q.coords[1]).dist(r) < 1e-12);
        }
    }
}
