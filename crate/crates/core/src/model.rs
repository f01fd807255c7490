//! A polygon together with the images of its vertices, and the validity
//! test that decides whether any isometric filling can exist.

use serde::Serialize;
use thiserror::Error;

use crate::geom::{self, classify_lengths, PairClass, Point2, PointD, Tolerance};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("{vertices} vertices but {images} images")]
    LengthMismatch { vertices: usize, images: usize },
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("restricted cycle is not a simple polygon (edges {0} and {1})")]
    NotSimple(usize, usize),
    #[error("vertex index {0} out of range")]
    BadIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    NotSimple,
    WrongDimension,
    ExpansivePair,
    EdgeNotCritical,
    DegenerateEdge,
}

/// Why a boundary mapping admits no isometric filling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub kind: ViolationKind,
    pub i: usize,
    pub j: usize,
    pub domain_length: Option<T>,
    pub image_length: Option<T>,
}

impl<T: Scalar> std::fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at ({}, {})", self.kind, self.i, self.j)?;
        if let (Some(d), Some(i)) = (self.domain_length, self.image_length) {
            write!(f, ": domain length {d}, image length {i}")?;
        }
        Ok(())
    }
}

/// One corner of a sub-polygon built by [`BoundaryMapping::restrict`].
#[derive(Debug, Clone, PartialEq)]
pub enum Corner<T> {
    Vertex(usize),
    Extra { point: Point2<T>, image: PointD<T> },
}

/// The pair (P, f): a simple counterclockwise polygon and the image of each
/// vertex. Edges map by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMapping<T> {
    dimension: usize,
    vertices: Vec<Point2<T>>,
    images: Vec<PointD<T>>,
    input_index: Vec<usize>,
}

impl<T: Scalar> BoundaryMapping<T> {
    /// Builds an instance, reordering clockwise input to counterclockwise
    /// while keeping vertex 0 in place.
    pub fn new(dimension: usize, vertices: Vec<Point2<T>>, images: Vec<PointD<T>>) -> Result<Self, ModelError> {
        let n = vertices.len();
        if n < 3 {
            return Err(ModelError::TooFewVertices(n));
        }
        if images.len() != n {
            return Err(ModelError::LengthMismatch { vertices: n, images: images.len() });
        }
        if let Some(k) = (0..n).find(|&k| !vertices[k].is_finite() || !images[k].is_finite()) {
            return Err(ModelError::NonFinite(k));
        }
        let area = geom::signed_area(&vertices);
        if area == T::zero() {
            return Err(ModelError::ZeroArea);
        }
        let order: Vec<usize> = if area > T::zero() {
            (0..n).collect()
        } else {
            std::iter::once(0).chain((1..n).rev()).collect()
        };
        Ok(BoundaryMapping {
            dimension,
            vertices: order.iter().map(|&k| vertices[k]).collect(),
            images: order.iter().map(|&k| images[k].clone()).collect(),
            input_index: order,
        })
    }

    /// Builds an instance from data already known to be counterclockwise.
    pub(crate) fn from_ccw(dimension: usize, vertices: Vec<Point2<T>>, images: Vec<PointD<T>>) -> Self {
        let input_index = (0..vertices.len()).collect();
        BoundaryMapping { dimension, vertices, images, input_index }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn images(&self) -> &[PointD<T>] {
        &self.images
    }

    pub fn vertex(&self, i: usize) -> Point2<T> {
        self.vertices[i]
    }

    pub fn image(&self, i: usize) -> &PointD<T> {
        &self.images[i]
    }

    /// Index in the caller's original vertex list of stored vertex `i`.
    pub fn input_index(&self, i: usize) -> usize {
        self.input_index[i]
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i == j || self.next(i) == j || self.next(j) == i
    }

    pub fn diameter(&self) -> T {
        geom::bbox_diameter(&self.vertices)
    }

    pub fn area(&self) -> T {
        geom::signed_area(&self.vertices)
    }

    pub fn default_tolerance(&self) -> Tolerance<T> {
        Tolerance::for_diameter(self.diameter())
    }

    /// Domain and image distance between vertices `i` and `j`.
    pub fn lengths(&self, i: usize, j: usize) -> (T, T) {
        (self.vertices[i].dist(self.vertices[j]), self.images[i].dist(&self.images[j]))
    }

    pub fn classify(&self, i: usize, j: usize, tol: &Tolerance<T>) -> PairClass {
        let (d, f) = self.lengths(i, j);
        classify_lengths(d, f, tol)
    }

    /// Image of the point at parameter `s` along edge `(k, k+1)`.
    pub fn edge_image(&self, k: usize, s: T) -> PointD<T> {
        self.images[k].lerp(&self.images[self.next(k)], s)
    }

    /// Decides validity: every vertex pair nonexpansive and every edge
    /// mapped to a congruent segment. The lowest offending index pair is
    /// reported.
    pub fn validate(&self, tol: &Tolerance<T>) -> Result<(), Violation<T>> {
        let n = self.len();
        let structural = |kind, i, j| Violation { kind, i, j, domain_length: None, image_length: None };
        if self.dimension < 2 {
            return Err(structural(ViolationKind::WrongDimension, 0, 0));
        }
        if let Some(k) = (0..n).find(|&k| self.images[k].dim() != self.dimension) {
            return Err(structural(ViolationKind::WrongDimension, k, k));
        }
        for k in 0..n {
            let (d, f) = self.lengths(k, self.next(k));
            if d <= tol.eps_abs {
                let (i, j) = if k + 1 == n { (0, k) } else { (k, k + 1) };
                return Err(Violation { kind: ViolationKind::DegenerateEdge, i, j, domain_length: Some(d), image_length: Some(f) });
            }
        }
        if let Some((i, j)) = geom::simplicity_violation(&self.vertices, tol.band(self.diameter())) {
            return Err(structural(ViolationKind::NotSimple, i, j));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (d, f) = self.lengths(i, j);
                let class = classify_lengths(d, f, tol);
                let kind = if self.adjacent(i, j) {
                    (class != PairClass::Critical).then_some(ViolationKind::EdgeNotCritical)
                } else {
                    (class == PairClass::Expansive).then_some(ViolationKind::ExpansivePair)
                };
                if let Some(kind) = kind {
                    return Err(Violation { kind, i, j, domain_length: Some(d), image_length: Some(f) });
                }
            }
        }
        Ok(())
    }

    /// Sub-polygon on the given corner cycle, inheriting images from this
    /// instance; extra corners carry their own prescribed images.
    pub fn restrict(&self, corners: &[Corner<T>]) -> Result<Self, ModelError> {
        if corners.len() < 3 {
            return Err(ModelError::TooFewVertices(corners.len()));
        }
        let mut vertices = Vec::with_capacity(corners.len());
        let mut images = Vec::with_capacity(corners.len());
        for c in corners {
            match c {
                Corner::Vertex(k) => {
                    if *k >= self.len() {
                        return Err(ModelError::BadIndex(*k));
                    }
                    vertices.push(self.vertices[*k]);
                    images.push(self.images[*k].clone());
                }
                Corner::Extra { point, image } => {
                    vertices.push(*point);
                    images.push(image.clone());
                }
            }
        }
        let band = self.default_tolerance().band(self.diameter());
        if let Some((i, j)) = geom::simplicity_violation(&vertices, band) {
            return Err(ModelError::NotSimple(i, j));
        }
        if geom::signed_area(&vertices) <= T::zero() {
            return Err(ModelError::ZeroArea);
        }
        Ok(BoundaryMapping::from_ccw(self.dimension, vertices, images))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn scaled_square() -> BoundaryMapping<f64> {
        let v = vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let f = v.iter().map(|q| PointD::new(vec![2.0 * q.x, 2.0 * q.y])).collect();
        BoundaryMapping::new(2, v, f).unwrap()
    }

    #[test]
    fn corpus_instances_are_valid() {
        for (name, bm) in corpus::all::<f64>() {
            assert_eq!(bm.validate(&bm.default_tolerance()), Ok(()), "{name}");
        }
    }

    #[test]
    fn scaled_square_reports_edge_zero() {
        let bm = scaled_square();
        let v = bm.validate(&bm.default_tolerance()).unwrap_err();
        assert_eq!(v.kind, ViolationKind::EdgeNotCritical);
        assert_eq!((v.i, v.j), (0, 1));
        assert_eq!(v.domain_length, Some(1.0));
        assert_eq!(v.image_length, Some(2.0));
    }

    #[test]
    fn fold_pairs_by_brute_force() {
        // all 15 pairs of the folded square, checked without the validator
        let bm = corpus::fold::<f64>();
        for i in 0..6 {
            for j in i + 1..6 {
                let d = bm.vertex(i).dist(bm.vertex(j));
                let f = bm.image(i).dist(bm.image(j));
                assert!(f <= d + 1e-12, "{i} {j}");
                if bm.adjacent(i, j) {
                    assert!((f - d).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn structural_violations_come_first() {
        let v = vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let mut f: Vec<_> = v.iter().map(|q| PointD::new(vec![q.x, q.y])).collect();
        f[2] = PointD::new(vec![1.0, 1.0, 0.0]);
        let bm = BoundaryMapping::new(2, v.clone(), f).unwrap();
        assert_eq!(bm.validate(&bm.default_tolerance()).unwrap_err().kind, ViolationKind::WrongDimension);

        let bow = vec![p(0., 0.), p(1., 1.), p(1., 0.), p(0., 1.)];
        let f = bow.iter().map(|q| PointD::new(vec![q.x, q.y])).collect();
        let bm = BoundaryMapping::from_ccw(2, bow, f);
        assert_eq!(bm.validate(&bm.default_tolerance()).unwrap_err().kind, ViolationKind::NotSimple);

        let dup = vec![p(0., 0.), p(1., 0.), p(1., 0.), p(0., 1.)];
        let f = dup.iter().map(|q| PointD::new(vec![q.x, q.y])).collect();
        let bm = BoundaryMapping::new(2, dup, f).unwrap();
        assert_eq!(bm.validate(&bm.default_tolerance()).unwrap_err().kind, ViolationKind::DegenerateEdge);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let v = vec![p(0., 0.), p(0., 1.), p(1., 1.), p(1., 0.)];
        let f = v.iter().map(|q| PointD::new(vec![q.x, q.y])).collect();
        let bm = BoundaryMapping::new(2, v, f).unwrap();
        assert!(bm.area() > 0.0);
        assert_eq!(bm.vertex(1), p(1., 0.));
        assert_eq!(bm.input_index(1), 3);
        assert_eq!(bm.input_index(0), 0);
    }

    #[test]
    fn restrict_examples() {
        let id = corpus::identity::<f64>();
        let tri = id.restrict(&[Corner::Vertex(0), Corner::Vertex(1), Corner::Vertex(2)]).unwrap();
        assert_eq!(tri.len(), 3);
        assert_eq!(tri.validate(&tri.default_tolerance()), Ok(()));
        assert_eq!(tri.image(2), id.image(2));

        let fold = corpus::fold::<f64>();
        let left = fold.restrict(&[Corner::Vertex(0), Corner::Vertex(1), Corner::Vertex(4), Corner::Vertex(5)]).unwrap();
        for k in 0..4 {
            let q = left.vertex(k);
            assert_eq!(left.image(k), &PointD::new(vec![q.x, q.y]));
        }

        let with_extra = id
            .restrict(&[
                Corner::Vertex(0),
                Corner::Vertex(1),
                Corner::Extra { point: p(0.5, 0.5), image: PointD::new(vec![0.5, 0.5]) },
            ])
            .unwrap();
        assert_eq!(with_extra.image(2), &PointD::new(vec![0.5, 0.5]));

        let bad = id.restrict(&[Corner::Vertex(0), Corner::Vertex(2), Corner::Vertex(1), Corner::Vertex(3)]);
        assert!(matches!(bad, Err(ModelError::NotSimple(..))));
    }
}
