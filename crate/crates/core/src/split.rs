//! How far a bend line can be followed before its image gets too close to
//! the image of some boundary vertex.
//!
//! Along a unit-speed bend line `p(t) = v + t d` with image
//! `q(t) = f(v) + t e`, the slack against vertex `x`
//! `|p(t) - x|^2 - |q(t) - f(x)|^2` is affine in `t` because both squared
//! distances share the same `t^2` term.

use thiserror::Error;

use crate::bend::{BendLine, BendLineImage};
use crate::geom::{self, Carrier, GeomError, Point2, PointD, Tolerance};
use crate::model::BoundaryMapping;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("no vertex constraining the split at vertex {vertex} is visible from the split point")]
    NoVisibleTightVertex { vertex: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Slack `b + a t` against one boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConstraint<T> {
    pub vertex: usize,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn slack(&self, t: T) -> T {
        self.b + self.a * t
    }
}

/// Constraints against every vertex other than the bend line's origin.
pub fn split_constraints<T: Scalar>(
    bm: &BoundaryMapping<T>,
    line: &BendLine<T>,
    image: &BendLineImage<T>,
) -> Vec<LinearConstraint<T>> {
    let v = bm.vertex(line.vertex);
    let fv = bm.image(line.vertex);
    let two = T::lit(2.0);
    (0..bm.len())
        .filter(|&x| x != line.vertex)
        .map(|x| {
            let dv = v - bm.vertex(x);
            let df = fv.sub(bm.image(x));
            LinearConstraint {
                vertex: x,
                b: dv.dot(dv) - df.dot(&df),
                a: two * (line.dir.dot(dv) - image.dir.dot(&df)),
            }
        })
        .collect()
}

/// Largest `t <= length` keeping every slack nonnegative, together with the
/// vertices whose slack reaches zero there (ascending).
pub fn split_parameter<T: Scalar>(constraints: &[LinearConstraint<T>], length: T, band: T) -> (T, Vec<usize>) {
    let falling = |c: &&LinearConstraint<T>| c.a < -band;
    let root = |c: &LinearConstraint<T>| c.b.max(T::zero()) / -c.a;
    let t = constraints.iter().filter(falling).map(root).fold(length, T::min);
    let mut tight: Vec<usize> =
        constraints.iter().filter(falling).filter(|c| root(c) <= t + band).map(|c| c.vertex).collect();
    tight.sort_unstable();
    (t, tight)
}

/// Where the split segment from the bend line ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitEnd {
    /// Interior split point joined to this boundary vertex.
    Vertex(usize),
    /// The bend line reached the boundary before any constraint bound.
    Boundary(Carrier),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitTriple<T> {
    pub vertex: usize,
    pub t: T,
    pub point: Point2<T>,
    pub image: PointD<T>,
    pub end: SplitEnd,
    pub tight: Vec<usize>,
}

/// Follows the bend line until a constraint binds or the boundary is hit.
/// The far end is the lowest-index binding vertex whose open segment to the
/// split point is clear, or failing that one seen with boundary contact.
pub fn compute_split<T: Scalar>(
    bm: &BoundaryMapping<T>,
    line: &BendLine<T>,
    image: &BendLineImage<T>,
    tol: &Tolerance<T>,
) -> Result<SplitTriple<T>, SplitError> {
    let band = tol.band(bm.diameter());
    let constraints = split_constraints(bm, line, image);
    let (t, tight) = split_parameter(&constraints, line.length, band);
    let point = line.point_at(bm, t);
    let image_pt = image.at(t);
    let end = if line.length - t <= band {
        SplitEnd::Boundary(line.carrier)
    } else {
        let poly = bm.vertices();
        let clear = tight.iter().copied().find(|&x| geom::open_segment_clear(poly, point, poly[x], None, Some(x), band));
        let x = clear
            .or_else(|| tight.iter().copied().find(|&x| geom::visible(poly, point, poly[x], band)))
            .ok_or(SplitError::NoVisibleTightVertex { vertex: line.vertex })?;
        SplitEnd::Vertex(x)
    };
    Ok(SplitTriple { vertex: line.vertex, t, point, image: image_pt, end, tight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bend::{bend_line_image, select_bend_line, BendPolicy, Branch};
    use crate::corpus;

    #[test]
    fn constraint_is_the_slack() {
        let bm = corpus::skew::<f64>();
        let tol = bm.default_tolerance();
        let line = select_bend_line(&bm, 0, BendPolicy::Bisector, 0, &tol).unwrap();
        let img = bend_line_image(&bm, &line, Branch::Plus).unwrap();
        for c in split_constraints(&bm, &line, &img) {
            for t in [0.0, 0.3, 1.1] {
                let p = line.point_at(&bm, t);
                let direct = p.dist(bm.vertex(c.vertex)).powi(2) - img.at(t).dist(bm.image(c.vertex)).powi(2);
                assert!((direct - c.slack(t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parameter_takes_first_root() {
        let cs = [
            LinearConstraint { vertex: 3, a: -1.0, b: 0.5 },
            LinearConstraint { vertex: 1, a: -2.0, b: 1.0 },
            LinearConstraint { vertex: 2, a: 1.0, b: 0.0 },
            LinearConstraint { vertex: 4, a: -1.0, b: 0.9 },
        ];
        let (t, tight) = split_parameter(&cs, 2.0, 1e-12);
        assert_eq!(t, 0.5);
        assert_eq!(tight, vec![1, 3]);
        let (t, tight) = split_parameter(&cs[2..3], 2.0, 1e-12);
        assert_eq!(t, 2.0);
        assert!(tight.is_empty());
    }

    #[test]
    fn flat_fold_line_reaches_opposite_vertex() {
        let bm = corpus::fold::<f64>();
        let tol = bm.default_tolerance();
        let line = select_bend_line(&bm, 1, BendPolicy::MinAngle, 0, &tol).unwrap();
        let img = bend_line_image(&bm, &line, Branch::Plus).unwrap();
        let s = compute_split(&bm, &line, &img, &tol).unwrap();
        assert!((s.t - 1.0).abs() < 1e-12);
        assert_eq!(s.end, SplitEnd::Boundary(Carrier::Vertex(4)));
        assert!(s.image.dist(bm.image(4)) < 1e-12);
    }

    #[test]
    fn skew_split_keeps_every_slack() {
        let bm = corpus::skew::<f64>();
        let tol = bm.default_tolerance();
        let line = select_bend_line(&bm, 0, BendPolicy::Bisector, 0, &tol).unwrap();
        let img = bend_line_image(&bm, &line, Branch::Plus).unwrap();
        let s = compute_split(&bm, &line, &img, &tol).unwrap();
        for x in 1..4 {
            assert!(s.point.dist(bm.vertex(x)) >= s.image.dist(bm.image(x)) - 1e-12);
        }
        if let SplitEnd::Vertex(x) = s.end {
            assert!((s.point.dist(bm.vertex(x)) - s.image.dist(bm.image(x))).abs() < 1e-9);
            assert!(s.t < line.length);
        }
    }
}
