//! Piecewise-affine isometric fillings of polygons whose boundary has been
//! folded into R^d.
//!
//! Given a simple polygon and a nonexpansive, edge-length-preserving
//! piecewise-linear map of its boundary, [`solver::solve`] triangulates the
//! polygon and assigns every mesh vertex a folded position so that each
//! triangle maps congruently and the boundary lands where it was told to.
//! [`verify::verify`] checks such a mesh without trusting the solver, and
//! [`gen`] builds valid inputs by folding paper forward.
//!
//! Everything is generic over the [`Scalar`] type; the `*64` aliases below
//! fix it to `f64`, which is what the file formats and the CLI use.

pub mod scalar;
pub mod geom;
pub mod model;
pub mod bend;
pub mod corpus;
pub mod split;
pub mod solver;
pub mod verify;
pub mod gen;
pub mod io;

pub use scalar::Scalar;

pub type Point2f = geom::Point2<f64>;
pub type PointDf = geom::PointD<f64>;
pub type Tolerance64 = geom::Tolerance<f64>;
pub type BoundaryMapping64 = model::BoundaryMapping<f64>;
pub type SolutionMesh64 = solver::SolutionMesh<f64>;
pub type SolveTrace64 = solver::SolveTrace<f64>;

pub type Point2f32 = geom::Point2<f32>;
pub type PointDf32 = geom::PointD<f32>;
pub type Tolerance32 = geom::Tolerance<f32>;
pub type BoundaryMapping32 = model::BoundaryMapping<f32>;
pub type SolutionMesh32 = solver::SolutionMesh<f32>;
pub type SolveTrace32 = solver::SolveTrace<f32>;
