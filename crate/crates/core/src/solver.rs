//! Recursive partition of the polygon into triangles with folded corners.
//!
//! A worklist holds sub-polygons whose boundary mappings are valid. A piece
//! with a visible critical diagonal is cut along it (Routine 1). Otherwise
//! some vertex has contractive neighbours; a bend line from it is followed
//! to its split point, the piece is cut along the resulting path and the
//! two triangles at the vertex are cut off (Routine 2). Each call lowers the
//! potential `sum(len - 3)` by one. Triangles become mesh faces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bend::{self, BendError, BendLine, BendLineImage, BendPolicy, Branch};
use crate::geom::{self, Carrier, PairClass, Point2, PointD, Tolerance};
use crate::model::{BoundaryMapping, Violation};
use crate::split::{self, SplitEnd, SplitError};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError<T: Scalar> {
    #[error("invalid boundary mapping: {0}")]
    InvalidBoundary(Violation<T>),
    #[error("bend at vertex {vertex}: {source}")]
    Bend { vertex: usize, source: BendError },
    #[error("split failed: {0}")]
    Split(#[from] SplitError),
    #[error("piece {0:?} has neither a visible critical pair nor a vertex with contractive neighbours")]
    ExistenceViolation(Vec<usize>),
    #[error("piece {piece:?} has no visible critical pair after the split")]
    MissingCriticalPair { piece: Vec<usize> },
    #[error("split point image disagrees with the boundary at vertex {vertex} by {gap}")]
    SeamMismatch { vertex: usize, gap: f64 },
    #[error("audit failed: {0}")]
    Audit(String),
    #[error("triangle is not congruent to its image (edge residual {0})")]
    NotIsometric(f64),
    #[error("degenerate triangle")]
    DegenerateTriangle,
}

/// Solver error together with the trace recorded up to the failure.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct SolveFailure<T: Scalar> {
    pub error: SolveError<T>,
    pub trace: Box<SolveTrace<T>>,
}

/// A sub-polygon with its inherited boundary mapping. `ids[k]` is the mesh
/// vertex behind local vertex `k`; pieces sharing a seam share ids.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPiece<T> {
    pub bm: BoundaryMapping<T>,
    pub ids: Vec<usize>,
}

impl<T: Scalar> PartitionPiece<T> {
    /// The whole instance as one piece, with mesh ids `0..n`.
    pub fn root(bm: &BoundaryMapping<T>) -> Self {
        PartitionPiece { bm: bm.clone(), ids: (0..bm.len()).collect() }
    }

    fn sub(&self, local: &[usize], extra: Option<(usize, Point2<T>, PointD<T>)>) -> Self {
        let mut vertices: Vec<Point2<T>> = local.iter().map(|&k| self.bm.vertex(k)).collect();
        let mut images: Vec<PointD<T>> = local.iter().map(|&k| self.bm.image(k).clone()).collect();
        let mut ids: Vec<usize> = local.iter().map(|&k| self.ids[k]).collect();
        if let Some((id, p, q)) = extra {
            vertices.push(p);
            images.push(q);
            ids.push(id);
        }
        PartitionPiece { bm: BoundaryMapping::from_ccw(self.bm.dimension(), vertices, images), ids }
    }

    pub fn potential(&self) -> usize {
        self.bm.len() - 3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Routine2Kind {
    /// Split to an interior point, then the two triangles at the vertex.
    Split,
    /// The bend line ran into a vertex critical with the bend vertex.
    Diagonal,
    /// The bend line ran into an edge; its end became a boundary vertex.
    Insertion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "routine", rename_all = "snake_case")]
pub enum StepRecord<T> {
    Routine1 {
        /// Mesh ids of the diagonal.
        i: usize,
        j: usize,
        phi: usize,
    },
    Routine2 {
        vertex: usize,
        kind: Routine2Kind,
        policy: BendPolicy,
        branch: Branch,
        beta: T,
        t: T,
        reflex: bool,
        /// Mesh id of the split point, or of the vertex hit.
        point: usize,
        /// Mesh id of the far end of the split path.
        end: usize,
        phi: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace<T> {
    pub routine1: usize,
    pub routine2: usize,
    /// Boundary vertices added where a bend line met an edge.
    pub insertions: usize,
    /// Faces split afterwards to remove hanging vertices on seams.
    pub t_splits: usize,
    pub policy: BendPolicy,
    pub branch: Branch,
    pub seed: u64,
    pub phi: Vec<usize>,
    pub steps: Vec<StepRecord<T>>,
}

/// Triangulated domain with a folded position for every mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionMesh<T> {
    pub dimension: usize,
    pub vertices_domain: Vec<Point2<T>>,
    pub vertices_image: Vec<PointD<T>>,
    /// Counterclockwise in the domain.
    pub faces: Vec<[usize; 3]>,
    /// Input vertex index to mesh vertex index.
    pub boundary_map: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// `None` picks the dimension's default.
    pub policy: Option<BendPolicy>,
    pub branch: Branch,
    pub seed: u64,
    /// Validate every piece after every routine call.
    pub audit: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { policy: None, branch: Branch::Plus, seed: 0, audit: false }
    }
}

/// Affine map of a triangle onto a congruent copy:
/// `g(u + a(v-u) + b(w-u)) = f(u) + a(f(v)-f(u)) + b(f(w)-f(u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMap<T> {
    pub u: Point2<T>,
    /// Inverse of the matrix with columns `v-u`, `w-u`.
    pub inv: [[T; 2]; 2],
    pub fu: PointD<T>,
    pub dv: PointD<T>,
    pub dw: PointD<T>,
}

impl<T: Scalar> TriangleMap<T> {
    pub fn barycentric(&self, p: Point2<T>) -> (T, T) {
        let d = p - self.u;
        (self.inv[0][0] * d.x + self.inv[0][1] * d.y, self.inv[1][0] * d.x + self.inv[1][1] * d.y)
    }

    pub fn apply(&self, p: Point2<T>) -> PointD<T> {
        let (a, b) = self.barycentric(p);
        self.fu.add_scaled(&self.dv, a).add_scaled(&self.dw, b)
    }
}

impl<T: Scalar> TriangleMap<T> {
    /// Affine interpolation of the corner images without any congruence
    /// check; `None` for a zero-area triangle.
    pub fn affine(tri: [Point2<T>; 3], images: [&PointD<T>; 3]) -> Option<Self> {
        let (e1, e2) = (tri[1] - tri[0], tri[2] - tri[0]);
        let det = e1.cross(e2);
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        Some(TriangleMap {
            u: tri[0],
            inv: [[e2.y / det, -e2.x / det], [-e1.y / det, e1.x / det]],
            fu: images[0].clone(),
            dv: images[1].sub(images[0]),
            dw: images[2].sub(images[0]),
        })
    }
}

/// Map of a triangle onto its congruent image.
pub fn triangle_map<T: Scalar>(
    tri: [Point2<T>; 3],
    images: [&PointD<T>; 3],
    tol: &Tolerance<T>,
) -> Result<TriangleMap<T>, SolveError<T>> {
    let (e1, e2) = (tri[1] - tri[0], tri[2] - tri[0]);
    let scale = e1.norm().max(e2.norm());
    if e1.cross(e2).abs() <= tol.band(scale) * scale {
        return Err(SolveError::DegenerateTriangle);
    }
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let r = (tri[a].dist(tri[b]) - images[a].dist(images[b])).abs();
        if r > tol.band(tri[a].dist(tri[b])) {
            return Err(SolveError::NotIsometric(r.as_f64()));
        }
    }
    TriangleMap::affine(tri, images).ok_or(SolveError::DegenerateTriangle)
}

fn diagonal_ok<T: Scalar>(bm: &BoundaryMapping<T>, i: usize, j: usize, tol: &Tolerance<T>) -> bool {
    let poly = bm.vertices();
    !bm.adjacent(i, j)
        && bm.classify(i, j, tol) == PairClass::Critical
        && geom::in_interior_cone(poly, i, poly[j] - poly[i])
        && geom::open_segment_clear(poly, poly[i], poly[j], Some(i), Some(j), tol.band(bm.diameter()))
}

/// Lowest `(i, j)` in lexicographic order that is a nonadjacent critical
/// pair joined by a diagonal through the open interior.
pub fn find_visible_critical_pair<T: Scalar>(bm: &BoundaryMapping<T>, tol: &Tolerance<T>) -> Option<(usize, usize)> {
    let n = bm.len();
    (0..n).flat_map(|i| (i + 2..n).map(move |j| (i, j))).find(|&(i, j)| diagonal_ok(bm, i, j, tol))
}

/// Lowest vertex whose two neighbours are contractive.
pub fn find_double_contractive_vertex<T: Scalar>(bm: &BoundaryMapping<T>, tol: &Tolerance<T>) -> Option<usize> {
    (0..bm.len()).find(|&v| bm.classify(bm.prev(v), bm.next(v), tol) == PairClass::Contractive)
}

/// Cuts `piece` along the diagonal between local vertices `i` and `j`.
pub fn routine1<T: Scalar>(piece: &PartitionPiece<T>, i: usize, j: usize) -> (PartitionPiece<T>, PartitionPiece<T>) {
    let (i, j) = (i.min(j), i.max(j));
    let n = piece.bm.len();
    let first: Vec<usize> = (i..=j).collect();
    let second: Vec<usize> = (j..n).chain(0..=i).collect();
    (piece.sub(&first, None), piece.sub(&second, None))
}

/// Result of one Routine 2 call.
#[derive(Debug, Clone, PartialEq)]
pub struct Routine2Outcome<T> {
    pub kind: Routine2Kind,
    pub pieces: Vec<PartitionPiece<T>>,
    pub line: BendLine<T>,
    pub line_image: BendLineImage<T>,
    pub policy: BendPolicy,
    pub t: T,
    /// Mesh id of the split point (fresh for `Split`/`Insertion`).
    pub point: usize,
    pub point_domain: Point2<T>,
    pub point_image: PointD<T>,
    pub end: usize,
    /// Mesh ids `(a, b, p)` when `p` was inserted on edge `a -> b`.
    pub inserted: Option<(usize, usize, usize)>,
}

fn bend_with_fallback<T: Scalar>(
    bm: &BoundaryMapping<T>,
    v: usize,
    policy: BendPolicy,
    branch: Branch,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<(BendLine<T>, BendLineImage<T>, BendPolicy), BendError> {
    let attempt = |p: BendPolicy| -> Result<(BendLine<T>, BendLineImage<T>, BendPolicy), BendError> {
        let line = bend::select_bend_line(bm, v, p, seed, tol)?;
        let image = bend::bend_line_image(bm, &line, branch)?;
        Ok((line, image, p))
    };
    match attempt(policy) {
        Err(BendError::Infeasible) if bm.dimension() >= 3 && policy != BendPolicy::Bisector => {
            log::debug!("policy {policy} infeasible at vertex {v}, retrying with bisector");
            attempt(BendPolicy::Bisector)
        }
        other => other,
    }
}

fn cut_pair<T: Scalar>(
    piece: &PartitionPiece<T>,
    preferred: (usize, usize),
    tol: &Tolerance<T>,
) -> Result<(PartitionPiece<T>, PartitionPiece<T>), SolveError<T>> {
    let (i, j) = if diagonal_ok(&piece.bm, preferred.0, preferred.1, tol) {
        preferred
    } else {
        log::debug!("preferred diagonal {preferred:?} unavailable, scanning piece");
        find_visible_critical_pair(&piece.bm, tol)
            .ok_or_else(|| SolveError::MissingCriticalPair { piece: piece.ids.clone() })?
    };
    Ok(routine1(piece, i, j))
}

/// Routine 2 at local vertex `v`. `new_id` is the mesh id given to a newly
/// created point.
pub fn routine2<T: Scalar>(
    piece: &PartitionPiece<T>,
    v: usize,
    policy: BendPolicy,
    branch: Branch,
    seed: u64,
    new_id: usize,
    tol: &Tolerance<T>,
) -> Result<Routine2Outcome<T>, SolveError<T>> {
    let bm = &piece.bm;
    let n = bm.len();
    let band = tol.band(bm.diameter());
    let (line, line_image, used) =
        bend_with_fallback(bm, v, policy, branch, seed, tol).map_err(|source| SolveError::Bend { vertex: piece.ids[v], source })?;
    let s = split::compute_split(bm, &line, &line_image, tol)?;
    let mut out = Routine2Outcome {
        kind: Routine2Kind::Split,
        pieces: Vec::new(),
        line,
        line_image,
        policy: used,
        t: s.t,
        point: new_id,
        point_domain: s.point,
        point_image: s.image.clone(),
        end: 0,
        inserted: None,
    };
    match s.end {
        SplitEnd::Vertex(x) => {
            let (u, w) = (bm.prev(v), bm.next(v));
            let first: Vec<usize> = (0..n).map(|k| (v + k) % n).take_while(|&k| k != x).chain([x]).collect();
            let second: Vec<usize> = (0..n).map(|k| (x + k) % n).take_while(|&k| k != v).chain([v]).collect();
            let p1 = piece.sub(&first, Some((new_id, s.point, s.image.clone())));
            let p2 = piece.sub(&second, Some((new_id, s.point, s.image.clone())));
            let (m1, m2) = (p1.bm.len(), p2.bm.len());
            debug_assert_eq!(p1.bm.vertex(1), bm.vertex(w));
            debug_assert_eq!(p2.bm.vertex(m2 - 3), bm.vertex(u));
            let (a1, b1) = cut_pair(&p1, (1, m1 - 1), tol)?;
            let (a2, b2) = cut_pair(&p2, (m2 - 3, m2 - 1), tol)?;
            out.end = piece.ids[x];
            out.pieces = vec![a1, b1, a2, b2];
        }
        SplitEnd::Boundary(Carrier::Vertex(c)) => {
            let gap = s.image.dist(bm.image(c));
            if bm.adjacent(v, c) || c == v || gap > band {
                return Err(SolveError::SeamMismatch { vertex: piece.ids[c], gap: gap.as_f64() });
            }
            if !diagonal_ok(bm, v, c, tol) {
                return Err(SolveError::MissingCriticalPair { piece: piece.ids.clone() });
            }
            let (a, b) = routine1(piece, v, c);
            out.kind = Routine2Kind::Diagonal;
            out.point = piece.ids[c];
            out.end = piece.ids[c];
            out.pieces = vec![a, b];
        }
        SplitEnd::Boundary(Carrier::Edge(k)) => {
            let k1 = bm.next(k);
            let (a, b) = (bm.vertex(k), bm.vertex(k1));
            let frac = s.point.dist(a) / a.dist(b);
            let expected = bm.image(k).lerp(bm.image(k1), frac);
            let gap = expected.dist(&s.image);
            if gap > band || k == v || k1 == v {
                return Err(SolveError::SeamMismatch { vertex: piece.ids[k], gap: gap.as_f64() });
            }
            // p becomes local vertex k + 1 of the enlarged piece
            let order: Vec<usize> = (0..n).collect();
            let mut vertices: Vec<Point2<T>> = order.iter().map(|&i| bm.vertex(i)).collect();
            let mut images: Vec<PointD<T>> = order.iter().map(|&i| bm.image(i).clone()).collect();
            let mut ids: Vec<usize> = order.iter().map(|&i| piece.ids[i]).collect();
            let at = k + 1;
            vertices.insert(at, s.point);
            images.insert(at, expected.clone());
            ids.insert(at, new_id);
            let grown = PartitionPiece { bm: BoundaryMapping::from_ccw(bm.dimension(), vertices, images), ids };
            let v_new = if v > k { v + 1 } else { v };
            if !diagonal_ok(&grown.bm, v_new, at, tol) {
                return Err(SolveError::MissingCriticalPair { piece: grown.ids.clone() });
            }
            let (pa, pb) = routine1(&grown, v_new, at);
            out.kind = Routine2Kind::Insertion;
            out.point_image = expected;
            out.end = new_id;
            out.inserted = Some((piece.ids[k], piece.ids[k1], new_id));
            out.pieces = vec![pa, pb];
        }
    }
    Ok(out)
}

fn audit_pieces<T: Scalar>(
    parent: &PartitionPiece<T>,
    pieces: &[PartitionPiece<T>],
    tol: &Tolerance<T>,
    diameter: T,
) -> Result<(), SolveError<T>> {
    for p in pieces {
        if let Err(v) = p.bm.validate(tol) {
            return Err(SolveError::Audit(format!("piece {:?}: {v}", p.ids)));
        }
    }
    let total: T = pieces.iter().map(|p| p.bm.area()).sum();
    let gap = (total - parent.bm.area()).abs();
    if gap > tol.band(diameter) * diameter {
        return Err(SolveError::Audit(format!("piece areas differ from parent by {gap}")));
    }
    // shared ids must carry identical positions
    let mut seen: std::collections::HashMap<usize, (Point2<T>, &PointD<T>)> = std::collections::HashMap::new();
    for p in std::iter::once(parent).chain(pieces) {
        for (k, &id) in p.ids.iter().enumerate() {
            let here = (p.bm.vertex(k), p.bm.image(k));
            if let Some(prev) = seen.insert(id, here) {
                if prev.0 != here.0 || prev.1 != here.1 {
                    return Err(SolveError::Audit(format!("mesh vertex {id} carries two positions")));
                }
            }
        }
    }
    Ok(())
}

/// Splits faces having a hanging vertex in the interior of one of their
/// edges. Returns the number of splits.
fn remove_hanging_vertices<T: Scalar>(
    mesh: &mut SolutionMesh<T>,
    hanging: &[usize],
    tol: &Tolerance<T>,
    diameter: T,
) -> Result<usize, SolveError<T>> {
    let band = tol.band(diameter);
    let mut splits = 0;
    for &m in hanging {
        let pm = mesh.vertices_domain[m];
        loop {
            let found = mesh.faces.iter().enumerate().find_map(|(fi, f)| {
                if f.contains(&m) {
                    return None;
                }
                (0..3).find_map(|e| {
                    let (y, z) = (f[e], f[(e + 1) % 3]);
                    let (py, pz) = (mesh.vertices_domain[y], mesh.vertices_domain[z]);
                    let len = py.dist(pz);
                    let s = (pm - py).dot(pz - py) / (len * len);
                    let inside = s * len > band && (T::one() - s) * len > band;
                    (inside && geom::point_segment_distance(pm, py, pz) <= band).then_some((fi, e, s))
                })
            });
            let Some((fi, e, s)) = found else { break };
            let f = mesh.faces[fi];
            let (y, z, c) = (f[e], f[(e + 1) % 3], f[(e + 2) % 3]);
            let expected = mesh.vertices_image[y].lerp(&mesh.vertices_image[z], s);
            let gap = expected.dist(&mesh.vertices_image[m]);
            if gap > band {
                return Err(SolveError::SeamMismatch { vertex: m, gap: gap.as_f64() });
            }
            mesh.faces[fi] = [y, m, c];
            mesh.faces.push([m, z, c]);
            splits += 1;
        }
    }
    Ok(splits)
}

/// Fills the polygon: returns a mesh whose faces map congruently and whose
/// boundary follows the given mapping.
pub fn solve<T: Scalar>(
    bm: &BoundaryMapping<T>,
    opts: &SolveOptions,
) -> Result<(SolutionMesh<T>, SolveTrace<T>), SolveFailure<T>> {
    let policy = opts.policy.unwrap_or_else(|| BendPolicy::default_for(bm.dimension()));
    let tol = bm.default_tolerance();
    let diameter = bm.diameter();
    let n = bm.len();
    let mut trace = SolveTrace {
        routine1: 0,
        routine2: 0,
        insertions: 0,
        t_splits: 0,
        policy,
        branch: opts.branch,
        seed: opts.seed,
        phi: vec![n.saturating_sub(3)],
        steps: Vec::new(),
    };
    macro_rules! fail {
        ($e:expr) => {
            return Err(SolveFailure { error: $e, trace: Box::new(trace) })
        };
    }
    if let Err(v) = bm.validate(&tol) {
        fail!(SolveError::InvalidBoundary(v));
    }
    if policy == BendPolicy::Bisector && bm.dimension() < 3 {
        fail!(SolveError::Bend { vertex: 0, source: BendError::InvalidPolicy(policy, bm.dimension()) });
    }
    let mut mesh = SolutionMesh {
        dimension: bm.dimension(),
        vertices_domain: bm.vertices().to_vec(),
        vertices_image: bm.images().to_vec(),
        faces: Vec::with_capacity(2 * n),
        boundary_map: vec![0; n],
    };
    for k in 0..n {
        mesh.boundary_map[bm.input_index(k)] = k;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut hanging = Vec::new();
    let mut phi = n - 3;
    let mut work = vec![PartitionPiece::root(bm)];
    while let Some(piece) = work.pop() {
        if piece.bm.len() == 3 {
            let [a, b, c] = [piece.ids[0], piece.ids[1], piece.ids[2]];
            let tri = [piece.bm.vertex(0), piece.bm.vertex(1), piece.bm.vertex(2)];
            let imgs = [piece.bm.image(0), piece.bm.image(1), piece.bm.image(2)];
            if geom::signed_area(&tri) <= T::zero() {
                fail!(SolveError::DegenerateTriangle);
            }
            for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                let r = (tri[a].dist(tri[b]) - imgs[a].dist(imgs[b])).abs();
                if r > T::lit(16.0) * tol.band(diameter) {
                    fail!(SolveError::NotIsometric(r.as_f64()));
                }
            }
            mesh.faces.push([a, b, c]);
            continue;
        }
        let children = if let Some((i, j)) = find_visible_critical_pair(&piece.bm, &tol) {
            let (a, b) = routine1(&piece, i, j);
            trace.routine1 += 1;
            phi -= 1;
            trace.steps.push(StepRecord::Routine1 { i: piece.ids[i], j: piece.ids[j], phi });
            vec![a, b]
        } else {
            let Some(v) = find_double_contractive_vertex(&piece.bm, &tol) else {
                fail!(SolveError::ExistenceViolation(piece.ids.clone()));
            };
            let new_id = mesh.vertices_domain.len();
            let out = match routine2(&piece, v, policy, opts.branch, rng.gen(), new_id, &tol) {
                Ok(o) => o,
                Err(e) => fail!(e),
            };
            match out.kind {
                Routine2Kind::Split => {
                    trace.routine2 += 1;
                    phi -= 1;
                }
                Routine2Kind::Diagonal => {
                    trace.routine1 += 1;
                    phi -= 1;
                }
                Routine2Kind::Insertion => {
                    trace.insertions += 1;
                    trace.phi.push(phi + 1);
                    trace.routine1 += 1;
                }
            }
            if out.point == new_id {
                mesh.vertices_domain.push(out.point_domain);
                mesh.vertices_image.push(out.point_image.clone());
            }
            if out.inserted.is_some() {
                hanging.push(new_id);
            }
            trace.steps.push(StepRecord::Routine2 {
                vertex: piece.ids[v],
                kind: out.kind,
                policy: out.policy,
                branch: opts.branch,
                beta: out.line.beta,
                t: out.t,
                reflex: out.line.theta > T::PI(),
                point: out.point,
                end: out.end,
                phi,
            });
            out.pieces
        };
        let measured: usize = children.iter().map(PartitionPiece::potential).sum::<usize>() + pending_potential(&work);
        debug_assert_eq!(measured, phi);
        trace.phi.push(phi);
        if opts.audit {
            if let Err(e) = audit_pieces(&piece, &children, &tol, diameter) {
                fail!(e);
            }
        }
        // LIFO: the last pushed piece is processed first
        work.extend(children.into_iter().rev());
    }
    match remove_hanging_vertices(&mut mesh, &hanging, &tol, diameter) {
        Ok(k) => trace.t_splits = k,
        Err(e) => fail!(e),
    }
    Ok((mesh, trace))
}

fn pending_potential<T: Scalar>(work: &[PartitionPiece<T>]) -> usize {
    work.iter().map(PartitionPiece::potential).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn audited() -> SolveOptions {
        SolveOptions { audit: true, ..SolveOptions::default() }
    }

    #[test]
    fn critical_pair_examples() {
        let tol = |bm: &BoundaryMapping<f64>| bm.default_tolerance();
        let id = corpus::identity::<f64>();
        assert_eq!(find_visible_critical_pair(&id, &tol(&id)), Some((0, 2)));
        let fold = corpus::fold::<f64>();
        assert_eq!(find_visible_critical_pair(&fold, &tol(&fold)), Some((0, 4)));
        assert!(diagonal_ok(&fold, 1, 4, &tol(&fold)));
        let skew = corpus::skew::<f64>();
        assert_eq!(find_visible_critical_pair(&skew, &tol(&skew)), None);
        assert_eq!(find_double_contractive_vertex(&skew, &tol(&skew)), Some(0));
    }

    #[test]
    fn routine1_splits_fold_into_rectangles() {
        let fold = corpus::fold::<f64>();
        let (a, b) = routine1(&PartitionPiece::root(&fold), 1, 4);
        assert_eq!(a.ids, vec![1, 2, 3, 4]);
        assert_eq!(b.ids, vec![4, 5, 0, 1]);
        let tol = fold.default_tolerance();
        assert!(a.bm.validate(&tol).is_ok() && b.bm.validate(&tol).is_ok());
        assert!((a.bm.area() + b.bm.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_map_examples() {
        let tol = Tolerance::for_diameter(1.0);
        let tri = [Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(0., 1.)];
        let f = [PointD::new(vec![0., 0., 0.]), PointD::new(vec![1., 0., 0.]), PointD::new(vec![0., 0., 1.])];
        let m = triangle_map(tri, [&f[0], &f[1], &f[2]], &tol).unwrap();
        assert_eq!(m.apply(tri[0]), f[0]);
        assert!(m.apply(Point2::new(0.5, 0.5)).dist(&PointD::new(vec![0.5, 0., 0.5])) < 1e-15);
        let bad = PointD::new(vec![0., 0., 2.]);
        assert!(matches!(triangle_map(tri, [&f[0], &f[1], &bad], &tol), Err(SolveError::NotIsometric(_))));
    }

    #[test]
    fn identity_gives_two_faces() {
        let (mesh, trace) = solve(&corpus::identity::<f64>(), &audited()).unwrap();
        assert_eq!(mesh.faces.len(), 2);
        assert_eq!((trace.routine1, trace.routine2), (1, 0));
        assert_eq!(trace.phi, vec![1, 0]);
    }

    #[test]
    fn corpus_accounting() {
        for (name, bm) in corpus::all::<f64>() {
            let (mesh, trace) = solve(&bm, &audited()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(trace.insertions, 0, "{name}");
            assert_eq!(trace.routine1 + trace.routine2, bm.len() - 3, "{name}");
            assert_eq!(mesh.faces.len(), 1 + trace.routine1 + 3 * trace.routine2, "{name}");
            assert_eq!(*trace.phi.last().unwrap(), 0);
        }
    }

    #[test]
    fn skew_runs_routine2_on_both_branches() {
        let bm = corpus::skew::<f64>();
        for branch in [Branch::Plus, Branch::Minus] {
            let opts = SolveOptions { policy: Some(BendPolicy::Bisector), branch, ..audited() };
            let (mesh, trace) = solve(&bm, &opts).unwrap();
            assert!(trace.routine2 >= 1);
            let tol = bm.default_tolerance();
            for f in &mesh.faces {
                let tri = f.map(|k| mesh.vertices_domain[k]);
                let img = [&mesh.vertices_image[f[0]], &mesh.vertices_image[f[1]], &mesh.vertices_image[f[2]]];
                triangle_map(tri, img, &tol).unwrap();
            }
        }
    }

    #[test]
    fn planar_corner_uses_crease() {
        let bm = corpus::corner_fold::<f64>();
        let (mesh, _) = solve(&bm, &audited()).unwrap();
        assert_eq!(mesh.faces.len(), 3);
    }

    #[test]
    fn bisector_rejected_in_plane() {
        let opts = SolveOptions { policy: Some(BendPolicy::Bisector), ..SolveOptions::default() };
        let err = solve(&corpus::fold::<f64>(), &opts).unwrap_err();
        assert!(matches!(err.error, SolveError::Bend { source: BendError::InvalidPolicy(..), .. }));
    }
}
