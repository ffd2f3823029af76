//! Clusters of planar regions bounded by circular arcs, with pressure and
//! stationarity verifiers.
//!
//! Faces are recovered from the geometry: the rotation at each vertex is
//! the counterclockwise order of outgoing tangents, and each face is
//! traversed with its region on the left.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arc_geometry::{normalize_angle, ArcPolygon, DirectedArc, GeometryError, Point};

pub type RegionId = u32;
pub const EXTERNAL: RegionId = 0;

/// Default tolerance for pressure consistency.
pub const PRESSURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("the external region has no finite area")]
    ExternalRegionArea,
    #[error("unknown region {0}")]
    UnknownRegion(RegionId),
    #[error("region adjacency graph is not connected to the external region")]
    UngroundedPressures,
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotTrivalent { vertex: usize, degree: usize },
    #[error("pressures are not assigned")]
    PressuresUnset,
    #[error("external region 0 is missing")]
    MissingExternalRegion,
    #[error("external region must have pressure 0, got {0}")]
    ExternalPressure(f64),
    #[error("duplicate region id {0}")]
    DuplicateRegion(RegionId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(i64),
    #[error("edge {edge} references missing vertex {vertex}")]
    EdgeEndpoint { edge: usize, vertex: i64 },
    #[error("edge {edge} has region {region} on both sides")]
    SameRegionBothSides { edge: usize, region: RegionId },
    #[error("face through edge {edge} has inconsistent region labels")]
    InconsistentFace { edge: usize },
    #[error("unbounded face labelled with bounded region {region}")]
    UnboundedFace { region: RegionId },
    #[error("Euler counts violated: {vertices} vertices, {edges} edges, {bounded_faces} bounded faces")]
    EulerMismatch { vertices: usize, edges: usize, bounded_faces: usize },
    #[error("component loops in file disagree with the embedded faces")]
    ComponentMismatch,
    #[error("invalid JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    pub pressure: Option<f64>,
}

impl Region {
    pub fn new(id: RegionId, pressure: Option<f64>) -> Self {
        Region { id, pressure }
    }

    pub fn is_external(&self) -> bool {
        self.id == EXTERNAL
    }
}

/// An arc edge between two vertices, by index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    pub turn: f64,
    pub left: RegionId,
    pub right: RegionId,
}

/// An edge traversed in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn twin(self) -> Dart {
        Dart { edge: self.edge, forward: !self.forward }
    }

    fn index(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }
}

/// A face loop, traversed with its region on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub region: RegionId,
    pub darts: Vec<Dart>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    regions: Vec<Region>,
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    arcs: Vec<DirectedArc>,
    rotation: Vec<[Dart; 3]>,
    faces: Vec<Face>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    pub pressures: BTreeMap<RegionId, f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub max_angle_residual: f64,
    pub max_curvature_residual: f64,
    pub max_vertex_curvature_sum: f64,
    pub pressures: BTreeMap<RegionId, f64>,
    pub pressures_assigned: bool,
    pub turning_residuals: Vec<f64>,
    pub pressure_formula_residual: f64,
    pub tol: f64,
}

impl StationarityReport {
    /// Angles, curvature-pressure relation and vertex curvature sums within `tol`.
    pub fn passes(&self) -> bool {
        self.max_angle_residual <= self.tol
            && self.max_curvature_residual <= self.tol
            && self.max_vertex_curvature_sum <= self.tol
    }

    pub fn max_turning_residual(&self) -> f64 {
        self.turning_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_angle_residual.max(self.max_curvature_residual).max(self.max_vertex_curvature_sum)
    }
}

impl Cluster {
    pub fn new(mut regions: Vec<Region>, vertices: Vec<Point>, edges: Vec<Edge>) -> Result<Self, ClusterError> {
        regions.sort_by_key(|r| r.id);
        for w in regions.windows(2) {
            if w[0].id == w[1].id {
                return Err(ClusterError::DuplicateRegion(w[0].id));
            }
        }
        match regions.first() {
            Some(r) if r.id == EXTERNAL => {
                if let Some(p) = r.pressure {
                    if p != 0.0 {
                        return Err(ClusterError::ExternalPressure(p));
                    }
                }
            }
            _ => return Err(ClusterError::MissingExternalRegion),
        }
        for r in &regions {
            if let Some(p) = r.pressure {
                if !p.is_finite() {
                    return Err(GeometryError::NonFinite("pressure").into());
                }
            }
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite("vertex").into());
            }
        }
        let known: BTreeSet<RegionId> = regions.iter().map(|r| r.id).collect();
        let mut arcs = Vec::with_capacity(edges.len());
        let mut degree = vec![0usize; vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            for v in [e.start, e.end] {
                if v >= vertices.len() {
                    return Err(ClusterError::EdgeEndpoint { edge: i, vertex: v as i64 });
                }
                degree[v] += 1;
            }
            if e.left == e.right {
                return Err(ClusterError::SameRegionBothSides { edge: i, region: e.left });
            }
            for r in [e.left, e.right] {
                if !known.contains(&r) {
                    return Err(ClusterError::UnknownRegion(r));
                }
            }
            arcs.push(DirectedArc::new(vertices[e.start], vertices[e.end], e.turn)?);
        }
        if let Some((v, &d)) = degree.iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(ClusterError::NotTrivalent { vertex: v, degree: d });
        }

        let mut out: Vec<Vec<(f64, f64, Dart)>> = vec![Vec::new(); vertices.len()];
        for (i, (e, a)) in edges.iter().zip(&arcs).enumerate() {
            let k = a.curvature();
            out[e.start].push((normalize_angle(a.start_tangent_angle()), k, Dart { edge: i, forward: true }));
            out[e.end].push((normalize_angle(a.end_tangent_angle() + PI), -k, Dart { edge: i, forward: false }));
        }
        let rotation: Vec<[Dart; 3]> = out
            .into_iter()
            .map(|mut list| {
                list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
                [list[0].2, list[1].2, list[2].2]
            })
            .collect();

        let mut cluster = Cluster { regions, vertices, edges, arcs, rotation, faces: Vec::new() };
        cluster.faces = cluster.trace_faces()?;
        cluster.check_euler()?;
        Ok(cluster)
    }

    fn trace_faces(&self) -> Result<Vec<Face>, ClusterError> {
        let n = 2 * self.edges.len();
        let mut seen = vec![false; n];
        let mut faces = Vec::new();
        for idx in 0..n {
            if seen[idx] {
                continue;
            }
            let first = Dart { edge: idx / 2, forward: idx % 2 == 0 };
            let mut darts = Vec::new();
            let mut d = first;
            loop {
                seen[d.index()] = true;
                darts.push(d);
                d = self.next_in_face(d);
                if d == first {
                    break;
                }
            }
            let region = self.dart_left(darts[0]);
            if let Some(bad) = darts.iter().find(|&&x| self.dart_left(x) != region) {
                return Err(ClusterError::InconsistentFace { edge: bad.edge });
            }
            faces.push(Face { region, darts });
        }
        for f in &mut faces {
            let pos = f.darts.iter().enumerate().min_by_key(|(_, d)| d.index()).map(|(i, _)| i).unwrap_or(0);
            f.darts.rotate_left(pos);
        }
        faces.sort_by_key(|f| (f.region, f.darts[0].index()));
        Ok(faces)
    }

    fn check_euler(&self) -> Result<(), ClusterError> {
        let mut bounded = 0;
        for (i, f) in self.faces.iter().enumerate() {
            if self.face_area(i) > 0.0 {
                bounded += 1;
            } else if f.region != EXTERNAL {
                return Err(ClusterError::UnboundedFace { region: f.region });
            }
        }
        let v = self.vertices.len();
        let e = self.edges.len();
        if bounded < 2 || v != 2 * (bounded - 1) || e != 3 * (bounded - 1) || self.faces.len() != bounded + 1 {
            return Err(ClusterError::EulerMismatch { vertices: v, edges: e, bounded_faces: bounded });
        }
        Ok(())
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn arc(&self, edge: usize) -> &DirectedArc {
        &self.arcs[edge]
    }

    pub fn region_ids(&self) -> Vec<RegionId> {
        self.regions.iter().map(|r| r.id).collect()
    }

    pub fn bounded_region_ids(&self) -> Vec<RegionId> {
        self.regions.iter().filter(|r| !r.is_external()).map(|r| r.id).collect()
    }

    pub fn region(&self, id: RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    /// Outgoing darts at a vertex in counterclockwise order.
    pub fn rotation(&self, vertex: usize) -> [Dart; 3] {
        self.rotation[vertex]
    }

    pub fn dart_tail(&self, d: Dart) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.start
        } else {
            e.end
        }
    }

    pub fn dart_head(&self, d: Dart) -> usize {
        self.dart_tail(d.twin())
    }

    pub fn dart_left(&self, d: Dart) -> RegionId {
        let e = &self.edges[d.edge];
        if d.forward {
            e.left
        } else {
            e.right
        }
    }

    pub fn dart_arc(&self, d: Dart) -> DirectedArc {
        if d.forward {
            self.arcs[d.edge]
        } else {
            self.arcs[d.edge].reversed()
        }
    }

    /// Following face `d` lies on: the predecessor of the twin in the rotation at the head.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        let t = d.twin();
        let rot = &self.rotation[self.dart_tail(t)];
        let k = rot.iter().position(|&x| x == t).expect("dart in rotation");
        rot[(k + 2) % 3]
    }

    pub fn face_polygon(&self, face: usize) -> ArcPolygon {
        let arcs = self.faces[face].darts.iter().map(|&d| self.dart_arc(d)).collect();
        ArcPolygon::new(arcs).expect("traced faces are closed")
    }

    pub fn face_area(&self, face: usize) -> f64 {
        self.face_polygon(face).signed_area()
    }

    pub fn face_is_bounded(&self, face: usize) -> bool {
        self.face_area(face) > 0.0
    }

    pub fn region_faces(&self, id: RegionId) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].region == id).collect()
    }

    /// Index of the unbounded face.
    pub fn outer_face(&self) -> usize {
        (0..self.faces.len()).find(|&i| !self.face_is_bounded(i)).expect("one unbounded face")
    }

    pub fn region_area(&self, id: RegionId) -> Result<f64, ClusterError> {
        if id == EXTERNAL {
            return Err(ClusterError::ExternalRegionArea);
        }
        if self.region(id).is_none() {
            return Err(ClusterError::UnknownRegion(id));
        }
        Ok(self.region_faces(id).into_iter().map(|f| self.face_area(f)).sum())
    }

    /// Areas of all bounded regions, keyed by id.
    pub fn areas(&self) -> BTreeMap<RegionId, f64> {
        self.bounded_region_ids().into_iter().map(|id| (id, self.region_area(id).expect("bounded region"))).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.arcs.iter().map(DirectedArc::length).sum()
    }

    /// Boundary length P(E_k) of one region.
    pub fn region_boundary_length(&self, id: RegionId) -> f64 {
        self.edges.iter().zip(&self.arcs).filter(|(e, _)| e.left == id || e.right == id).map(|(_, a)| a.length()).sum()
    }

    pub fn has_pressures(&self) -> bool {
        self.regions.iter().all(|r| r.pressure.is_some())
    }

    pub fn assigned_pressures(&self) -> Result<BTreeMap<RegionId, f64>, ClusterError> {
        self.regions.iter().map(|r| r.pressure.map(|p| (r.id, p)).ok_or(ClusterError::PressuresUnset)).collect()
    }

    pub fn pressure(&self, id: RegionId) -> Option<f64> {
        self.region(id).and_then(|r| r.pressure)
    }

    pub fn with_pressures(&self, pressures: &BTreeMap<RegionId, f64>) -> Result<Cluster, ClusterError> {
        let regions = self.regions.iter().map(|r| Region::new(r.id, pressures.get(&r.id).copied())).collect();
        Cluster::new(regions, self.vertices.clone(), self.edges.clone())
    }

    /// Least-squares pressures from κ_e = p_left − p_right with p₀ = 0.
    pub fn solve_pressures(&self) -> Result<PressureSolution, ClusterError> {
        let ids = self.bounded_region_ids();
        let col: BTreeMap<RegionId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let mut adj: BTreeMap<RegionId, Vec<RegionId>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.left).or_default().push(e.right);
            adj.entry(e.right).or_default().push(e.left);
        }
        let mut reached = BTreeSet::from([EXTERNAL]);
        let mut queue = VecDeque::from([EXTERNAL]);
        while let Some(r) = queue.pop_front() {
            for &s in adj.get(&r).into_iter().flatten() {
                if reached.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        if ids.iter().any(|id| !reached.contains(id)) {
            return Err(ClusterError::UngroundedPressures);
        }

        let m = self.edges.len();
        let n = ids.len();
        let mut a = DMatrix::<f64>::zeros(m, n);
        let mut b = DVector::<f64>::zeros(m);
        for (row, (e, arc)) in self.edges.iter().zip(&self.arcs).enumerate() {
            if let Some(&c) = col.get(&e.left) {
                a[(row, c)] += 1.0;
            }
            if let Some(&c) = col.get(&e.right) {
                a[(row, c)] -= 1.0;
            }
            b[row] = arc.curvature();
        }
        let x = a.clone().svd(true, true).solve(&b, 1e-13).map_err(|_| ClusterError::UngroundedPressures)?;
        let resid = (&a * &x - &b).amax();
        let mut pressures = BTreeMap::from([(EXTERNAL, 0.0)]);
        for (i, id) in ids.iter().enumerate() {
            pressures.insert(*id, x[i]);
        }
        Ok(PressureSolution { pressures, residual: resid })
    }

    /// Assigned pressures when complete, least-squares pressures otherwise.
    pub fn effective_pressures(&self) -> Result<(BTreeMap<RegionId, f64>, bool), ClusterError> {
        if self.has_pressures() {
            Ok((self.assigned_pressures()?, true))
        } else {
            Ok((self.solve_pressures()?.pressures, false))
        }
    }

    /// Pairwise counterclockwise gaps between the outgoing tangents at a vertex.
    pub fn vertex_angles(&self, vertex: usize) -> [f64; 3] {
        let ang: Vec<f64> =
            self.rotation[vertex].iter().map(|&d| normalize_angle(self.dart_arc(d).start_tangent_angle())).collect();
        [normalize_angle(ang[1] - ang[0]), normalize_angle(ang[2] - ang[1]), normalize_angle(ang[0] - ang[2] + TAU)]
    }

    pub fn check_stationary(&self, tol: f64) -> Result<StationarityReport, ClusterError> {
        let (pressures, assigned) = self.effective_pressures()?;
        let mut max_angle: f64 = 0.0;
        let mut max_sum: f64 = 0.0;
        for v in 0..self.vertices.len() {
            for g in self.vertex_angles(v) {
                max_angle = max_angle.max((g - TAU / 3.0).abs());
            }
            let s: f64 = self.rotation[v].iter().map(|&d| self.dart_arc(d).curvature()).sum();
            max_sum = max_sum.max(s.abs());
        }
        let mut max_curv: f64 = 0.0;
        for (e, a) in self.edges.iter().zip(&self.arcs) {
            let want = pressures[&e.left] - pressures[&e.right];
            max_curv = max_curv.max((a.curvature() - want).abs());
        }
        let turning_residuals = (0..self.faces.len()).map(|f| self.turning_with(f, &pressures)).collect();
        let pressure_formula_residual = self.pressure_formula_with(&pressures);
        Ok(StationarityReport {
            max_angle_residual: max_angle,
            max_curvature_residual: max_curv,
            max_vertex_curvature_sum: max_sum,
            pressures,
            pressures_assigned: assigned,
            turning_residuals,
            pressure_formula_residual,
            tol,
        })
    }

    fn turning_with(&self, face: usize, pressures: &BTreeMap<RegionId, f64>) -> f64 {
        let f = &self.faces[face];
        let n = f.darts.len() as f64;
        let pi_ = pressures[&f.region];
        let sum: f64 =
            f.darts.iter().map(|&d| (pi_ - pressures[&self.dart_left(d.twin())]) * self.arcs[d.edge].length()).sum();
        if self.face_is_bounded(face) {
            ((6.0 - n) * PI / 3.0 - sum).abs()
        } else {
            // Σ (p_j − p_0) L_j = −Σ (p_0 − p_j) L_j
            ((6.0 + n) * PI / 3.0 + sum).abs()
        }
    }

    /// |LHS − RHS| of the turning-angle identity for one face.
    pub fn turning_angle_residual(&self, face: usize) -> Result<f64, ClusterError> {
        let p = self.assigned_pressures()?;
        Ok(self.turning_with(face, &p))
    }

    fn pressure_formula_with(&self, pressures: &BTreeMap<RegionId, f64>) -> f64 {
        let rhs: f64 = self
            .bounded_region_ids()
            .into_iter()
            .map(|id| pressures[&id] * self.region_area(id).expect("bounded"))
            .sum();
        (self.perimeter() - 2.0 * rhs).abs()
    }

    /// |P − 2 Σ p_i m(E_i)|.
    pub fn pressure_formula_residual(&self) -> Result<f64, ClusterError> {
        let p = self.assigned_pressures()?;
        Ok(self.pressure_formula_with(&p))
    }

    /// Coordinates times `t`, pressures divided by `t`.
    pub fn scaled(&self, t: f64) -> Result<Cluster, ClusterError> {
        let regions = self.regions.iter().map(|r| Region::new(r.id, r.pressure.map(|p| p / t))).collect();
        let vertices = self.vertices.iter().map(|&v| v * t).collect();
        Cluster::new(regions, vertices, self.edges.clone())
    }

    /// Rename region ids; ids missing from `map` are kept.
    pub fn relabel_regions(&self, map: &BTreeMap<RegionId, RegionId>) -> Result<Cluster, ClusterError> {
        let f = |id: RegionId| *map.get(&id).unwrap_or(&id);
        let regions = self.regions.iter().map(|r| Region::new(f(r.id), r.pressure)).collect();
        let edges = self.edges.iter().map(|e| Edge { left: f(e.left), right: f(e.right), ..*e }).collect();
        Cluster::new(regions, self.vertices.clone(), edges)
    }

    /// Is a face adjacent to the external region?
    pub fn face_is_external(&self, face: usize) -> bool {
        self.faces[face].darts.iter().any(|&d| self.dart_left(d.twin()) == EXTERNAL)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ClusterFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Cluster, ClusterError> {
        let file: ClusterFile = serde_json::from_str(text).map_err(|e| ClusterError::Json(e.to_string()))?;
        file.into_cluster()
    }
}

pub fn region_area(c: &Cluster, id: RegionId) -> Result<f64, ClusterError> {
    c.region_area(id)
}

pub fn cluster_perimeter(c: &Cluster) -> f64 {
    c.perimeter()
}

pub fn solve_pressures(c: &Cluster) -> Result<PressureSolution, ClusterError> {
    c.solve_pressures()
}

pub fn check_stationary(c: &Cluster, tol: f64) -> Result<StationarityReport, ClusterError> {
    c.check_stationary(tol)
}

pub fn turning_angle_residual(c: &Cluster, face: usize) -> Result<f64, ClusterError> {
    c.turning_angle_residual(face)
}

pub fn pressure_formula_residual(c: &Cluster) -> Result<f64, ClusterError> {
    c.pressure_formula_residual()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionRecord {
    id: RegionId,
    pressure: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: i64,
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    v_start: i64,
    v_end: i64,
    turn: f64,
    left_region: RegionId,
    right_region: RegionId,
}

/// On-disk cluster layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterFile {
    regions: Vec<RegionRecord>,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    /// Face loops are derivable from the edges; when given they are checked.
    #[serde(default)]
    components: Option<Vec<Vec<usize>>>,
}

impl From<&Cluster> for ClusterFile {
    fn from(c: &Cluster) -> Self {
        ClusterFile {
            regions: c.regions.iter().map(|r| RegionRecord { id: r.id, pressure: r.pressure }).collect(),
            vertices: c
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| VertexRecord { id: i as i64, x: v.x, y: v.y })
                .collect(),
            edges: c
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    v_start: e.start as i64,
                    v_end: e.end as i64,
                    turn: e.turn,
                    left_region: e.left,
                    right_region: e.right,
                })
                .collect(),
            components: Some(c.faces.iter().map(|f| f.darts.iter().map(|d| d.edge).collect()).collect()),
        }
    }
}

impl ClusterFile {
    fn into_cluster(self) -> Result<Cluster, ClusterError> {
        let mut index = BTreeMap::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(ClusterError::DuplicateVertex(v.id));
            }
            vertices.push(Point::try_new(v.x, v.y)?);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let look = |id: i64| index.get(&id).copied().ok_or(ClusterError::EdgeEndpoint { edge: i, vertex: id });
            edges.push(Edge {
                start: look(e.v_start)?,
                end: look(e.v_end)?,
                turn: e.turn,
                left: e.left_region,
                right: e.right_region,
            });
        }
        let regions = self.regions.iter().map(|r| Region::new(r.id, r.pressure)).collect();
        let cluster = Cluster::new(regions, vertices, edges)?;

        let canon = |loops: Vec<Vec<usize>>| {
            let mut v: Vec<Vec<usize>> = loops
                .into_iter()
                .map(|mut l| {
                    l.sort_unstable();
                    l
                })
                .collect();
            v.sort();
            v
        };
        if let Some(given) = self.components {
            let mine: Vec<Vec<usize>> =
                cluster.faces.iter().map(|f| f.darts.iter().map(|d| d.edge).collect()).collect();
            if canon(mine) != canon(given) {
                return Err(ClusterError::ComponentMismatch);
            }
        }
        Ok(cluster)
    }
}
