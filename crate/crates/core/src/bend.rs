//! Single-crease local solutions at a vertex whose two neighbours are
//! pulled closer together by the boundary mapping.
//!
//! A bend line leaves vertex `v` at angle `beta` from the edge `v -> u`
//! (measured towards the interior). Its image leaves `f(v)` along a unit
//! direction `e` chosen so that the triangles `p v u` and `p v w` keep their
//! shape for every point `p` on the line. In the plane only the two extreme
//! angles of the admissible interval work; from three dimensions on, every
//! angle in the closed interval does.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Carrier, GeomError, PairClass, Point2, PointD, Tolerance};
use crate::model::BoundaryMapping;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BendError {
    #[error("neighbours of vertex {0} are not contractive")]
    NotContractive(usize),
    #[error("image angle {phi} is not smaller than interior angle {theta}")]
    AngleNotContracted { theta: f64, phi: f64 },
    #[error("policy {0} is not available in dimension {1}")]
    InvalidPolicy(BendPolicy, usize),
    #[error("no image direction reproduces the requested bend")]
    Infeasible,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// How the bend angle is picked inside its admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BendPolicy {
    Bisector,
    MinAngle,
    MaxAngle,
    Random,
}

impl BendPolicy {
    /// Bisector from three dimensions on, the smaller angle in the plane.
    pub fn default_for(dimension: usize) -> Self {
        if dimension >= 3 {
            BendPolicy::Bisector
        } else {
            BendPolicy::MinAngle
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BendPolicy::Bisector => "bisector",
            BendPolicy::MinAngle => "min-angle",
            BendPolicy::MaxAngle => "max-angle",
            BendPolicy::Random => "random",
        }
    }
}

impl std::fmt::Display for BendPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BendPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bisector" => Ok(BendPolicy::Bisector),
            "min-angle" | "min" => Ok(BendPolicy::MinAngle),
            "max-angle" | "max" => Ok(BendPolicy::MaxAngle),
            "random" => Ok(BendPolicy::Random),
            other => Err(format!("unknown bend policy '{other}'")),
        }
    }
}

/// Which of the two mirror-image solutions to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

impl FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Branch::Plus),
            "-" | "-1" | "minus" => Ok(Branch::Minus),
            other => Err(format!("unknown branch '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendLine<T> {
    pub vertex: usize,
    pub u: usize,
    pub w: usize,
    /// Interior angle at the vertex.
    pub theta: T,
    /// Angle between the images of the two incident edges.
    pub phi: T,
    /// Angle between the bend line and edge `v -> u`.
    pub beta: T,
    pub dir: Point2<T>,
    pub length: T,
    pub exit: Point2<T>,
    pub carrier: Carrier,
}

impl<T: Scalar> BendLine<T> {
    pub fn origin(&self, bm: &BoundaryMapping<T>) -> Point2<T> {
        bm.vertex(self.vertex)
    }

    pub fn point_at(&self, bm: &BoundaryMapping<T>, t: T) -> Point2<T> {
        bm.vertex(self.vertex) + self.dir * t
    }
}

/// Unit-speed image `q(t) = origin + t * dir` of a bend line.
#[derive(Debug, Clone, PartialEq)]
pub struct BendLineImage<T> {
    pub origin: PointD<T>,
    pub dir: PointD<T>,
}

impl<T: Scalar> BendLineImage<T> {
    pub fn at(&self, t: T) -> PointD<T> {
        self.origin.add_scaled(&self.dir, t)
    }
}

/// The three boundary points around a vertex and their images.
#[derive(Debug, Clone, Copy)]
pub struct LocalCorner<'a, T> {
    pub v: Point2<T>,
    pub u: Point2<T>,
    pub w: Point2<T>,
    pub fv: &'a PointD<T>,
    pub fu: &'a PointD<T>,
    pub fw: &'a PointD<T>,
}

impl<'a, T: Scalar> LocalCorner<'a, T> {
    pub fn of(bm: &'a BoundaryMapping<T>, v: usize) -> Self {
        let (u, w) = (bm.prev(v), bm.next(v));
        LocalCorner {
            v: bm.vertex(v),
            u: bm.vertex(u),
            w: bm.vertex(w),
            fv: bm.image(v),
            fu: bm.image(u),
            fw: bm.image(w),
        }
    }
}

/// Admissible bend angles `((θ-φ)/2, (θ+φ)/2)`.
pub fn bend_angle_interval<T: Scalar>(theta: T, phi: T) -> Result<(T, T), BendError> {
    if phi.partial_cmp(&theta) != Some(std::cmp::Ordering::Less) || phi < T::zero() {
        return Err(BendError::AngleNotContracted { theta: theta.as_f64(), phi: phi.as_f64() });
    }
    let two = T::lit(2.0);
    Ok(((theta - phi) / two, (theta + phi) / two))
}

fn cos_tolerance<T: Scalar>() -> T {
    T::min_relative_tolerance() * T::lit(100.0)
}

/// Deterministic unit vector orthogonal to every vector in `basis`
/// (assumed orthonormal): the standard axis with the largest residual.
fn complement_direction<T: Scalar>(basis: &[&PointD<T>], dim: usize) -> Option<PointD<T>> {
    let mut best: Option<(T, PointD<T>)> = None;
    for k in 0..dim {
        let mut r = PointD::zeros(dim);
        r.coords[k] = T::one();
        for b in basis {
            let c = r.dot(b);
            r = r.add_scaled(b, -c);
        }
        let n = r.norm();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, r));
        }
    }
    best.and_then(|(n, r)| (n > T::lit(1e-6)).then(|| r.scale(T::one() / n)))
}

/// Unit image direction `e` of a bend line leaving `corner.v` along the
/// unit vector `dir`, such that angles to both incident edges are kept.
pub fn image_direction<T: Scalar>(corner: &LocalCorner<'_, T>, dir: Point2<T>, branch: Branch) -> Result<PointD<T>, BendError> {
    let dim = corner.fv.dim();
    let a = corner.fu.sub(corner.fv).normalized().ok_or(GeomError::Coincident)?;
    let b = corner.fw.sub(corner.fv).normalized().ok_or(GeomError::Coincident)?;
    let uh = (corner.u - corner.v).normalized().ok_or(GeomError::Coincident)?;
    let wh = (corner.w - corner.v).normalized().ok_or(GeomError::Coincident)?;
    let dir = dir.normalized().ok_or(GeomError::Coincident)?;
    let ca = dir.dot(uh);
    let cb = dir.dot(wh);
    let ctol = cos_tolerance::<T>();

    if dim == 2 {
        // flat: e is a rotated by the bend angle one way or the other
        let beta = geom::ccw_angle(dir, uh);
        let a2 = Point2::new(a.coords[0], a.coords[1]);
        let b2 = Point2::new(b.coords[0], b.coords[1]);
        let order = match branch {
            Branch::Plus => [T::one(), -T::one()],
            Branch::Minus => [-T::one(), T::one()],
        };
        for s in order {
            let e = a2.rotate(-s * beta);
            if (e.dot(b2) - cb).abs() <= ctol {
                return Ok(PointD::new(vec![e.x, e.y]));
            }
        }
        return Err(BendError::Infeasible);
    }

    let ab = a.dot(&b);
    let b_perp = b.add_scaled(&a, -ab);
    let sin_phi = b_perp.norm();
    let sign = branch.sign::<T>();
    if sin_phi > T::lit(1e-12) {
        let bp = b_perp.scale(T::one() / sin_phi);
        let gamma = (cb - ca * ab) / sin_phi;
        let rest = T::one() - ca * ca - gamma * gamma;
        if rest < -ctol {
            return Err(BendError::Infeasible);
        }
        let mut e = a.scale(ca).add_scaled(&bp, gamma);
        let delta = rest.max(T::zero()).sqrt();
        if delta > T::zero() {
            let n = complement_direction(&[&a, &bp], dim).ok_or(BendError::Infeasible)?;
            e = e.add_scaled(&n, sign * delta);
        }
        return e.normalized().ok_or(BendError::Infeasible);
    }
    // incident edge images are collinear
    if (cb - ca * ab).abs() > ctol {
        return Err(BendError::Infeasible);
    }
    let n = complement_direction(&[&a], dim).ok_or(BendError::Infeasible)?;
    let delta = (T::one() - ca * ca).max(T::zero()).sqrt();
    a.scale(ca).add_scaled(&n, sign * delta).normalized().ok_or(BendError::Infeasible)
}

fn choose_beta<T: Scalar>(
    theta: T,
    phi: T,
    dimension: usize,
    policy: BendPolicy,
    rng: &mut impl Rng,
) -> Result<T, BendError> {
    let (lo, hi) = bend_angle_interval(theta, phi)?;
    Ok(match (policy, dimension) {
        (BendPolicy::MinAngle, _) => lo,
        (BendPolicy::MaxAngle, _) => hi,
        (BendPolicy::Bisector, d) if d >= 3 => theta / T::lit(2.0),
        (BendPolicy::Bisector, d) => return Err(BendError::InvalidPolicy(policy, d)),
        (BendPolicy::Random, 2) => {
            if rng.gen_bool(0.5) {
                lo
            } else {
                hi
            }
        }
        (BendPolicy::Random, _) => lo + (hi - lo) * T::lit(rng.gen::<f64>()),
    })
}

/// Bend line at vertex `v` with its angle chosen by `policy`; `seed` drives
/// the random policy.
pub fn select_bend_line<T: Scalar>(
    bm: &BoundaryMapping<T>,
    v: usize,
    policy: BendPolicy,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<BendLine<T>, BendError> {
    let (theta, phi) = corner_angles(bm, v, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = choose_beta(theta, phi, bm.dimension(), policy, &mut rng)?;
    bend_line_at_angle(bm, v, beta, tol)
}

/// Interior angle and image angle at `v`, after checking that its
/// neighbours contract.
pub fn corner_angles<T: Scalar>(bm: &BoundaryMapping<T>, v: usize, tol: &Tolerance<T>) -> Result<(T, T), BendError> {
    let (u, w) = (bm.prev(v), bm.next(v));
    if bm.classify(u, w, tol) != PairClass::Contractive {
        return Err(BendError::NotContractive(v));
    }
    let theta = geom::interior_angle(bm.vertices(), v)?;
    let phi = geom::image_angle(bm.image(u), bm.image(v), bm.image(w))?;
    Ok((theta, phi))
}

/// Bend line at vertex `v` leaving at angle `beta` from edge `v -> u`.
pub fn bend_line_at_angle<T: Scalar>(
    bm: &BoundaryMapping<T>,
    v: usize,
    beta: T,
    tol: &Tolerance<T>,
) -> Result<BendLine<T>, BendError> {
    let (theta, phi) = corner_angles(bm, v, tol)?;
    let (u, w) = (bm.prev(v), bm.next(v));
    let uh = (bm.vertex(u) - bm.vertex(v)).normalized().ok_or(GeomError::Coincident)?;
    let dir = uh.rotate(-beta);
    let exit = geom::ray_exit(bm.vertices(), v, dir, tol.band(bm.diameter()))?;
    Ok(BendLine {
        vertex: v,
        u,
        w,
        theta,
        phi,
        beta,
        dir,
        length: exit.length,
        exit: exit.point,
        carrier: exit.carrier,
    })
}

pub fn bend_line_image<T: Scalar>(
    bm: &BoundaryMapping<T>,
    line: &BendLine<T>,
    branch: Branch,
) -> Result<BendLineImage<T>, BendError> {
    let corner = LocalCorner::of(bm, line.vertex);
    let dir = image_direction(&corner, line.dir, branch)?;
    Ok(BendLineImage { origin: bm.image(line.vertex).clone(), dir })
}

/// Point at distances `r1, r2, r3` from `c1, c2, c3`. The solution is built
/// in the frame spanned by `c2 -> c1`, `c2 -> c3` and one orthogonal
/// direction; `branch` picks the side of the off-plane coordinate.
#[allow(clippy::too_many_arguments)]
pub fn trilaterate<T: Scalar>(
    c1: &PointD<T>,
    c2: &PointD<T>,
    c3: &PointD<T>,
    r1: T,
    r2: T,
    r3: T,
    branch: Branch,
    tol: &Tolerance<T>,
) -> Result<PointD<T>, BendError> {
    let dim = c2.dim();
    let two = T::lit(2.0);
    let d1 = c1.sub(c2);
    let d = d1.norm();
    let ex = d1.normalized().ok_or(GeomError::Coincident)?;
    let d3 = c3.sub(c2);
    let i = ex.dot(&d3);
    let ey_raw = d3.add_scaled(&ex, -i);
    let j = ey_raw.norm();
    if j <= tol.band(d3.norm()) {
        return Err(GeomError::Coincident.into());
    }
    let ey = ey_raw.scale(T::one() / j);
    let x = (r2 * r2 - r1 * r1 + d * d) / (two * d);
    let y = (r2 * r2 - r3 * r3 + i * i + j * j - two * i * x) / (two * j);
    let z2 = r2 * r2 - x * x - y * y;
    let slack = two * r2 * tol.band(r2);
    if z2 < -slack {
        return Err(BendError::Infeasible);
    }
    let mut q = c2.add_scaled(&ex, x).add_scaled(&ey, y);
    let z = z2.max(T::zero()).sqrt();
    if z > tol.band(r2) {
        if dim < 3 {
            return Err(BendError::Infeasible);
        }
        let n = complement_direction(&[&ex, &ey], dim).ok_or(BendError::Infeasible)?;
        q = q.add_scaled(&n, branch.sign::<T>() * z);
    }
    Ok(q)
}
