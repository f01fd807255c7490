//! Small named instances used by tests, examples and the CLI.

use crate::bend::{trilaterate, Branch};
use crate::geom::{Point2, PointD, Tolerance};
use crate::model::BoundaryMapping;
use crate::Scalar;

fn p2<T: Scalar>(x: f64, y: f64) -> Point2<T> {
    Point2::new(T::lit(x), T::lit(y))
}

fn pd<T: Scalar>(c: &[f64]) -> PointD<T> {
    PointD::new(c.iter().map(|&x| T::lit(x)).collect())
}

fn square<T: Scalar>() -> Vec<Point2<T>> {
    vec![p2(0., 0.), p2(1., 0.), p2(1., 1.), p2(0., 1.)]
}

fn strip<T: Scalar>() -> Vec<Point2<T>> {
    vec![p2(0., 0.), p2(0.5, 0.), p2(1., 0.), p2(1., 1.), p2(0.5, 1.), p2(0., 1.)]
}

/// Unit square mapped to itself.
pub fn identity<T: Scalar>() -> BoundaryMapping<T> {
    let v = square::<T>();
    let f = v.iter().map(|q| PointD::embed(*q, 2)).collect();
    BoundaryMapping::new(2, v, f).expect("identity instance is well formed")
}

/// Unit square with a vertical crease at x = 1/2, folded flat.
pub fn fold<T: Scalar>() -> BoundaryMapping<T> {
    let f = [[0., 0.], [0.5, 0.], [0., 0.], [0., 1.], [0.5, 1.], [0., 1.]];
    BoundaryMapping::new(2, strip(), f.iter().map(|c| pd(c)).collect()).expect("fold instance is well formed")
}

/// Unit square with the right half turned up by a right dihedral angle.
pub fn dihedral<T: Scalar>() -> BoundaryMapping<T> {
    let v = strip::<T>();
    let f = v
        .iter()
        .map(|q| {
            let (x, y) = (q.x.as_f64(), q.y.as_f64());
            if x <= 0.5 {
                pd(&[x, y, 0.])
            } else {
                pd(&[0.5, y, x - 0.5])
            }
        })
        .collect();
    BoundaryMapping::new(3, v, f).expect("dihedral instance is well formed")
}

/// Skew quadrilateral in space on the unit square. All four sides keep
/// their length and both diagonals contract; vertex 0 is lifted off the
/// plane of the other three images.
pub fn skew<T: Scalar>() -> BoundaryMapping<T> {
    let gamma = 1.2f64;
    let f1 = pd::<T>(&[1., 0., 0.]);
    let f2 = pd::<T>(&[1., 1., 0.]);
    let f3 = pd::<T>(&[1. - gamma.sin(), 1. - gamma.cos(), 0.]);
    let tol = Tolerance::for_diameter(T::lit(2.0));
    let f0 = trilaterate(&f1, &f2, &f3, T::one(), T::lit(1.25), T::one(), Branch::Plus, &tol)
        .expect("skew corner is reachable");
    BoundaryMapping::new(3, square(), vec![f0, f1, f2, f3]).expect("skew instance is well formed")
}

/// Unit square reflected in the plane about the line through the origin
/// at 5π/12, with the boundary point where that line leaves the square
/// added as a vertex. The image angle at the origin is π/3.
pub fn corner_fold<T: Scalar>() -> BoundaryMapping<T> {
    let a = 5.0 * std::f64::consts::PI / 12.0;
    let c = (std::f64::consts::PI / 12.0).tan();
    let reflect = |x: f64, y: f64| {
        let (c2, s2) = ((2.0 * a).cos(), (2.0 * a).sin());
        pd::<T>(&[c2 * x + s2 * y, s2 * x - c2 * y])
    };
    let v = vec![p2(0., 0.), p2(1., 0.), p2(1., 1.), p2(c, 1.), p2(0., 1.)];
    let f = vec![pd(&[0., 0.]), pd(&[1., 0.]), pd(&[1., 1.]), pd(&[c, 1.]), reflect(0., 1.)];
    BoundaryMapping::new(2, v, f).expect("corner fold instance is well formed")
}

/// Every named instance with its short name.
pub fn all<T: Scalar>() -> Vec<(&'static str, BoundaryMapping<T>)> {
    vec![
        ("identity", identity()),
        ("fold", fold()),
        ("dihedral", dihedral()),
        ("skew", skew()),
        ("corner-fold", corner_fold()),
    ]
}

pub fn by_name<T: Scalar>(name: &str) -> Option<BoundaryMapping<T>> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, bm)| bm)
}
