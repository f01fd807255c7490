//! Instance and solution files.
//!
//! Both are JSON documents carrying `"version": 1`. Coordinates are written
//! as shortest round-trip decimals, so reading a file back gives the same
//! doubles that were written.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bend::{BendPolicy, Branch};
use crate::geom::{Point2, PointD};
use crate::model::{BoundaryMapping, ModelError};
use crate::solver::{SolutionMesh, SolveTrace};
use crate::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub dimension: usize,
    pub vertices: Vec<[f64; 2]>,
    pub images: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub routine1: usize,
    pub routine2: usize,
    pub policy: BendPolicy,
    pub branch: Branch,
    pub seed: u64,
    #[serde(default)]
    pub insertions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub version: u32,
    pub dimension: usize,
    pub vertices_domain: Vec<[f64; 2]>,
    pub vertices_image: Vec<Vec<f64>>,
    pub faces: Vec<[usize; 3]>,
    pub boundary_map: Vec<usize>,
    pub trace: TraceRecord,
}

fn check_version(v: u32) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v))
    }
}

fn point2<T: Scalar>(c: [f64; 2]) -> Point2<T> {
    Point2::new(T::lit(c[0]), T::lit(c[1]))
}

fn point_d<T: Scalar>(c: &[f64], dimension: usize, what: &str, k: usize) -> Result<PointD<T>, FormatError> {
    if c.len() != dimension {
        return Err(FormatError::Shape(format!("{what} {k} has {} coordinates, expected {dimension}", c.len())));
    }
    Ok(PointD::new(c.iter().map(|&x| T::lit(x)).collect()))
}

fn out2<T: Scalar>(p: Point2<T>) -> [f64; 2] {
    [p.x.as_f64(), p.y.as_f64()]
}

fn out_d<T: Scalar>(p: &PointD<T>) -> Vec<f64> {
    p.coords.iter().map(|x| x.as_f64()).collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        check_version(file.version)?;
        if file.dimension < 2 {
            return Err(FormatError::Shape(format!("dimension must be at least 2, got {}", file.dimension)));
        }
        Ok(file)
    }

    pub fn from_mapping<T: Scalar>(bm: &BoundaryMapping<T>) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            dimension: bm.dimension(),
            vertices: bm.vertices().iter().map(|&p| out2(p)).collect(),
            images: bm.images().iter().map(out_d).collect(),
        }
    }

    pub fn to_mapping<T: Scalar>(&self) -> Result<BoundaryMapping<T>, FormatError> {
        let vertices = self.vertices.iter().map(|&c| point2(c)).collect();
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(k, c)| point_d(c, self.dimension, "image", k))
            .collect::<Result<_, _>>()?;
        Ok(BoundaryMapping::new(self.dimension, vertices, images)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes") + "\n"
    }
}

impl SolutionFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: SolutionFile = serde_json::from_str(text)?;
        check_version(file.version)?;
        let n = file.vertices_domain.len();
        if file.vertices_image.len() != n {
            return Err(FormatError::Shape(format!(
                "{n} domain vertices but {} image vertices",
                file.vertices_image.len()
            )));
        }
        if let Some(bad) = file.faces.iter().flatten().chain(&file.boundary_map).find(|&&k| k >= n) {
            return Err(FormatError::Shape(format!("vertex index {bad} out of range")));
        }
        Ok(file)
    }

    pub fn new<T: Scalar>(mesh: &SolutionMesh<T>, trace: &SolveTrace<T>) -> Self {
        SolutionFile {
            version: FORMAT_VERSION,
            dimension: mesh.dimension,
            vertices_domain: mesh.vertices_domain.iter().map(|&p| out2(p)).collect(),
            vertices_image: mesh.vertices_image.iter().map(out_d).collect(),
            faces: mesh.faces.clone(),
            boundary_map: mesh.boundary_map.clone(),
            trace: TraceRecord {
                routine1: trace.routine1,
                routine2: trace.routine2,
                policy: trace.policy,
                branch: trace.branch,
                seed: trace.seed,
                insertions: trace.insertions,
            },
        }
    }

    pub fn to_mesh<T: Scalar>(&self) -> Result<SolutionMesh<T>, FormatError> {
        let vertices_image = self
            .vertices_image
            .iter()
            .enumerate()
            .map(|(k, c)| point_d(c, self.dimension, "mesh vertex", k))
            .collect::<Result<_, _>>()?;
        Ok(SolutionMesh {
            dimension: self.dimension,
            vertices_domain: self.vertices_domain.iter().map(|&c| point2(c)).collect(),
            vertices_image,
            faces: self.faces.clone(),
            boundary_map: self.boundary_map.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes") + "\n"
    }
}
