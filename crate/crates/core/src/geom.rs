//! Planar points, image points in R^d and the polygon predicates everything
//! else is built on.
//!
//! All length comparisons go through [`Tolerance::band`], so a pair of
//! lengths is either equal within the band or strictly ordered beyond it.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("coincident points where distinct points are required")]
    Coincident,
    #[error("zero-length edge at vertex {0}")]
    ZeroLengthEdge(usize),
    #[error("ray from vertex {0} points outside the polygon")]
    NoBendDirection(usize),
    #[error("invalid tolerance: {0}")]
    BadTolerance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero()).then(|| self * (T::one() / n))
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Point2::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }

    pub fn lerp(self, other: Self, s: T) -> Self {
        self + (other - self) * s
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point2::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

/// A point of the image space R^d.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointD<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> PointD<T> {
    pub fn new(coords: Vec<T>) -> Self {
        PointD { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        PointD { coords: vec![T::zero(); dim] }
    }

    /// Embeds a planar point as `(x, y, 0, ..., 0)`.
    pub fn embed(p: Point2<T>, dim: usize) -> Self {
        let mut coords = vec![T::zero(); dim];
        coords[0] = p.x;
        if dim > 1 {
            coords[1] = p.y;
        }
        PointD { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn sub(&self, other: &Self) -> Self {
        PointD::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        PointD::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + b).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        PointD::new(self.coords.iter().map(|&a| a * s).collect())
    }

    /// `self + s * dir`
    pub fn add_scaled(&self, dir: &Self, s: T) -> Self {
        PointD::new(self.coords.iter().zip(&dir.coords).map(|(&a, &b)| a + s * b).collect())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero()).then(|| self.scale(T::one() / n))
    }

    pub fn lerp(&self, other: &Self, s: T) -> Self {
        PointD::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + (b - a) * s).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

/// Length comparison policy shared by every predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<T> {
    pub eps_rel: T,
    pub eps_abs: T,
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(eps_rel: T, eps_abs: T) -> Result<Self, GeomError> {
        let positive = |x: T| x > T::zero();
        if !positive(eps_abs) || !positive(eps_rel) || eps_rel > T::lit(1e-3) {
            return Err(GeomError::BadTolerance(format!(
                "need eps_abs > 0 and 0 < eps_rel <= 1e-3, got eps_rel={eps_rel}, eps_abs={eps_abs}"
            )));
        }
        Ok(Tolerance { eps_rel, eps_abs })
    }

    /// Default policy for an instance of the given diameter.
    pub fn for_diameter(diameter: T) -> Self {
        let rel = T::min_relative_tolerance();
        let scale = if diameter > T::zero() { diameter } else { T::one() };
        Tolerance { eps_rel: rel, eps_abs: rel * T::lit(1e-3) * scale }
    }

    /// Acceptance band for a comparison against a length `len`.
    pub fn band(&self, len: T) -> T {
        self.eps_abs.max(self.eps_rel * len.abs())
    }

    /// Same policy with both epsilons multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Tolerance { eps_rel: self.eps_rel * factor, eps_abs: self.eps_abs * factor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairClass {
    Expansive,
    Critical,
    Contractive,
}

/// Compares a domain distance with an image distance.
pub fn classify_lengths<T: Scalar>(domain: T, image: T, tol: &Tolerance<T>) -> PairClass {
    let band = tol.band(domain);
    if (image - domain).abs() <= band {
        PairClass::Critical
    } else if image > domain {
        PairClass::Expansive
    } else {
        PairClass::Contractive
    }
}

pub fn classify_pair<T: Scalar>(
    a: Point2<T>,
    b: Point2<T>,
    fa: &PointD<T>,
    fb: &PointD<T>,
    tol: &Tolerance<T>,
) -> Result<PairClass, GeomError> {
    let domain = a.dist(b);
    if domain <= tol.eps_abs {
        return Err(GeomError::Coincident);
    }
    Ok(classify_lengths(domain, fa.dist(fb), tol))
}

pub fn signed_area<T: Scalar>(poly: &[Point2<T>]) -> T {
    let n = poly.len();
    let twice: T = (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum();
    twice / T::lit(2.0)
}

/// Diagonal of the bounding box; used as the instance length scale.
pub fn bbox_diameter<T: Scalar>(pts: &[Point2<T>]) -> T {
    let mut lo = Point2::new(T::infinity(), T::infinity());
    let mut hi = Point2::new(T::neg_infinity(), T::neg_infinity());
    for p in pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if pts.is_empty() {
        T::zero()
    } else {
        (hi - lo).norm()
    }
}

/// Angle swept counterclockwise from `from` to `to`, in `[0, 2π)`.
pub fn ccw_angle<T: Scalar>(from: Point2<T>, to: Point2<T>) -> T {
    let a = from.cross(to).atan2(from.dot(to));
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Interior angle of a counterclockwise polygon at vertex `i`.
pub fn interior_angle<T: Scalar>(poly: &[Point2<T>], i: usize) -> Result<T, GeomError> {
    let n = poly.len();
    let v = poly[i];
    let prev = poly[(i + n - 1) % n];
    let next = poly[(i + 1) % n];
    if v.dist(next) == T::zero() {
        return Err(GeomError::ZeroLengthEdge(i));
    }
    if v.dist(prev) == T::zero() {
        return Err(GeomError::ZeroLengthEdge((i + n - 1) % n));
    }
    let a = ccw_angle(next - v, prev - v);
    // a zero sweep only happens for a spike; report it as a full turn
    Ok(if a == T::zero() { T::TAU() } else { a })
}

/// Unsigned angle at `fv` between the rays to `fu` and `fw`.
pub fn image_angle<T: Scalar>(fu: &PointD<T>, fv: &PointD<T>, fw: &PointD<T>) -> Result<T, GeomError> {
    let a = fu.sub(fv);
    let b = fw.sub(fv);
    let (na, nb) = (a.norm(), b.norm());
    if na == T::zero() || nb == T::zero() {
        return Err(GeomError::Coincident);
    }
    // Kahan's form stays accurate near 0 and π, where acos does not
    let (ua, ub) = (a.scale(nb), b.scale(na));
    let two = T::lit(2.0);
    Ok(two * ua.sub(&ub).norm().atan2(ua.add(&ub).norm()))
}

pub fn point_segment_distance<T: Scalar>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == T::zero() {
        return p.dist(a);
    }
    let s = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab * s)
}

/// Signed distance of `c` from the directed line `a -> b` (positive on the left).
fn side<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    let ab = b - a;
    let len = ab.norm();
    if len == T::zero() {
        return T::zero();
    }
    ab.cross(c - a) / len
}

/// Closed segments intersect (a shared endpoint counts).
pub fn segments_cross<T: Scalar>(s1: (Point2<T>, Point2<T>), s2: (Point2<T>, Point2<T>), band: T) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;
    if point_segment_distance(c, a, b) <= band
        || point_segment_distance(d, a, b) <= band
        || point_segment_distance(a, c, d) <= band
        || point_segment_distance(b, c, d) <= band
    {
        return true;
    }
    segments_cross_proper(s1, s2, band)
}

/// Interiors cross at a single point, with every endpoint strictly off the
/// other segment's line.
pub fn segments_cross_proper<T: Scalar>(s1: (Point2<T>, Point2<T>), s2: (Point2<T>, Point2<T>), band: T) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = side(a, b, c);
    let o2 = side(a, b, d);
    let o3 = side(c, d, a);
    let o4 = side(c, d, b);
    ((o1 > band && o2 < -band) || (o1 < -band && o2 > band))
        && ((o3 > band && o4 < -band) || (o3 < -band && o4 > band))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

pub fn locate<T: Scalar>(poly: &[Point2<T>], q: Point2<T>, band: T) -> Location {
    let n = poly.len();
    for i in 0..n {
        if point_segment_distance(q, poly[i], poly[(i + 1) % n]) <= band {
            return Location::Boundary;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > q.y) != (b.y > q.y) {
            let x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if q.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Parameters `s` along `p + s*r` at which the line touches segment `c-d`.
fn line_segment_hits<T: Scalar>(p: Point2<T>, r: Point2<T>, c: Point2<T>, d: Point2<T>, band: T, out: &mut Vec<T>) {
    let e = d - c;
    let rr = r.dot(r);
    let denom = r.cross(e);
    let elen = e.norm();
    let rlen = rr.sqrt();
    if rlen == T::zero() || elen == T::zero() {
        return;
    }
    if (denom / (rlen * elen)).abs() > T::epsilon() * T::lit(16.0) {
        let s = (c - p).cross(e) / denom;
        let u = (c - p).cross(r) / denom;
        let slack = band / elen;
        if u >= -slack && u <= T::one() + slack {
            out.push(s);
        }
    }
    // endpoints touching the line (also covers collinear overlap)
    for q in [c, d] {
        let off = r.cross(q - p).abs() / rlen;
        if off <= band {
            out.push((q - p).dot(r) / rr);
        }
    }
}

/// True iff the closed segment from `p` to `v` lies in the polygon
/// (boundary contact allowed).
pub fn visible<T: Scalar>(poly: &[Point2<T>], p: Point2<T>, v: Point2<T>, band: T) -> bool {
    let r = v - p;
    let len = r.norm();
    if len <= band {
        return locate(poly, p, band) != Location::Outside;
    }
    let n = poly.len();
    let mut params = vec![T::zero(), T::one()];
    for i in 0..n {
        line_segment_hits(p, r, poly[i], poly[(i + 1) % n], band, &mut params);
    }
    let ds = band / len;
    params.retain(|&s| s >= -ds && s <= T::one() + ds);
    let mut params: Vec<T> = params.into_iter().map(|s| s.max(T::zero()).min(T::one())).collect();
    params.sort_by(|a, b| a.partial_cmp(b).expect("finite parameters"));
    params.dedup_by(|a, b| (*a - *b).abs() <= ds);
    if locate(poly, p, band) == Location::Outside || locate(poly, v, band) == Location::Outside {
        return false;
    }
    params
        .windows(2)
        .all(|w| locate(poly, p + r * ((w[0] + w[1]) / T::lit(2.0)), band) != Location::Outside)
}

/// True iff the open segment `a-b` lies strictly in the interior of the
/// polygon. `ia`/`ib` name the polygon vertices sitting at the endpoints,
/// if any.
pub fn open_segment_clear<T: Scalar>(
    poly: &[Point2<T>],
    a: Point2<T>,
    b: Point2<T>,
    ia: Option<usize>,
    ib: Option<usize>,
    band: T,
) -> bool {
    let n = poly.len();
    let is_end = |k: usize| Some(k) == ia || Some(k) == ib;
    for (k, &q) in poly.iter().enumerate() {
        if !is_end(k) && point_segment_distance(q, a, b) <= band {
            return false;
        }
    }
    for k in 0..n {
        let k1 = (k + 1) % n;
        if is_end(k) || is_end(k1) {
            continue;
        }
        if segments_cross_proper((a, b), (poly[k], poly[k1]), band) {
            return false;
        }
    }
    locate(poly, a.lerp(b, T::lit(0.5)), band) == Location::Inside
}

/// True iff direction `d` leaves vertex `i` strictly inside its interior wedge.
pub fn in_interior_cone<T: Scalar>(poly: &[Point2<T>], i: usize, d: Point2<T>) -> bool {
    let n = poly.len();
    let v = poly[i];
    let next = poly[(i + 1) % n] - v;
    let prev = poly[(i + n - 1) % n] - v;
    let theta = ccw_angle(next, prev);
    let a = ccw_angle(next, d);
    let eps = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    a > eps && a < theta - eps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Carrier {
    Vertex(usize),
    Edge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayExit<T> {
    pub point: Point2<T>,
    pub length: T,
    pub carrier: Carrier,
}

/// First point where the ray from vertex `v` along `dir` leaves the polygon.
pub fn ray_exit<T: Scalar>(poly: &[Point2<T>], v: usize, dir: Point2<T>, band: T) -> Result<RayExit<T>, GeomError> {
    let n = poly.len();
    let origin = poly[v];
    let dir = dir.normalized().ok_or(GeomError::Coincident)?;
    let mut params = Vec::with_capacity(8);
    for i in 0..n {
        line_segment_hits(origin, dir, poly[i], poly[(i + 1) % n], band, &mut params);
    }
    params.retain(|&s| s > band);
    params.sort_by(|a, b| a.partial_cmp(b).expect("finite parameters"));
    params.dedup_by(|a, b| (*a - *b).abs() <= band);
    let first = *params.first().ok_or(GeomError::NoBendDirection(v))?;
    if locate(poly, origin + dir * (first / T::lit(2.0)), band) == Location::Outside {
        return Err(GeomError::NoBendDirection(v));
    }
    let probe = bbox_diameter(poly);
    let mut exit = *params.last().expect("nonempty");
    for (k, &s) in params.iter().enumerate() {
        let mid = match params.get(k + 1) {
            Some(&next) => (s + next) / T::lit(2.0),
            None => s + probe,
        };
        if locate(poly, origin + dir * mid, band) == Location::Outside {
            exit = s;
            break;
        }
    }
    let point = origin + dir * exit;
    let carrier = boundary_feature(poly, point, band);
    Ok(RayExit { point, length: exit, carrier })
}

/// Nearest boundary feature of a point on (or near) the boundary: a vertex
/// if one lies within `band`, otherwise the closest edge.
pub fn boundary_feature<T: Scalar>(poly: &[Point2<T>], q: Point2<T>, band: T) -> Carrier {
    let n = poly.len();
    if let Some(k) = (0..n).find(|&k| poly[k].dist(q) <= band) {
        return Carrier::Vertex(k);
    }
    let mut best = (T::infinity(), 0);
    for k in 0..n {
        let d = point_segment_distance(q, poly[k], poly[(k + 1) % n]);
        if d < best.0 {
            best = (d, k);
        }
    }
    Carrier::Edge(best.1)
}

/// First pair of edges `(i, j)`, `i < j`, that violates simplicity.
pub fn simplicity_violation<T: Scalar>(poly: &[Point2<T>], band: T) -> Option<(usize, usize)> {
    let n = poly.len();
    let edge = |k: usize| (poly[k], poly[(k + 1) % n]);
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // adjacent edges may only share their common vertex
                let (shared, a, b) = if j == i + 1 { (poly[j], poly[i], poly[(j + 1) % n]) } else { (poly[0], poly[1], poly[n - 1]) };
                let (da, db) = (a - shared, b - shared);
                let folded_back = da.cross(db).abs() <= band * da.norm().max(db.norm()) && da.dot(db) > T::zero();
                if folded_back {
                    return Some((i, j));
                }
                continue;
            }
            if segments_cross(edge(i), edge(j), band) {
                return Some((i, j));
            }
        }
    }
    None
}
