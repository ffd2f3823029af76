//! Builders for the concrete clusters: standard double and triple bubbles,
//! the explicit sandwich-shaped competitor, triangle growth and removal,
//! the sandwich and the symmetric flower.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, PI};

use thiserror::Error;

use crate::arc_geometry::{Carrier, DirectedArc, GeometryError, Point};
use crate::cluster::{Cluster, ClusterError, Edge, Region, RegionId, EXTERNAL};
use crate::newton::{damped_newton, NewtonOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    SolveFailed { what: &'static str, iterations: usize, residual: f64 },
    #[error("pressure {p_new} is not admissible: {reason}")]
    InvalidPressure { p_new: f64, reason: String },
    #[error("component has {edges} edges, expected 3")]
    NotTriangle { edges: usize },
    #[error("incident circles do not concur (residual {residual:e})")]
    NotStationaryInput { residual: f64 },
}

/// k₈ = √(2π/3 + √3/4): area of each region of the unit equal double bubble is k₈².
pub fn k8() -> f64 {
    (2.0 * PI / 3.0 + 3f64.sqrt() / 4.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleBubbleSpec {
    pub r1: f64,
    pub r2: f64,
}

impl DoubleBubbleSpec {
    pub fn pressures(&self) -> (f64, f64) {
        (1.0 / self.r1, 1.0 / self.r2)
    }

    pub fn build(&self) -> Result<Cluster, ConstructError> {
        make_double_bubble(self.r1, self.r2)
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConstructError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConstructError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Standard double bubble with outer radii r1 ≥ r2. Region 1 lies west of
/// the interface, region 2 east; the vertices sit on the y-axis.
pub fn make_double_bubble(r1: f64, r2: f64) -> Result<Cluster, ConstructError> {
    positive("r1", r1)?;
    positive("r2", r2)?;
    if r1 < r2 {
        return Err(ConstructError::InvalidParameter(format!("need r1 >= r2, got {r1} < {r2}")));
    }
    double_bubble_any_order(r1, r2)
}

/// Same construction without the ordering convention; for r1 < r2 the
/// interface bulges into region 2.
fn double_bubble_any_order(r1: f64, r2: f64) -> Result<Cluster, ConstructError> {
    positive("r1", r1)?;
    positive("r2", r2)?;
    let a = 2.0 * FRAC_PI_3;
    let s = (3f64.sqrt() * (r1 - r2) / (r1 + r2)).atan();
    let h = r1 * (a + s).sin();
    let vertices = vec![Point::new(0.0, h), Point::new(0.0, -h)];
    let edges = vec![
        Edge { start: 0, end: 1, turn: 2.0 * s, left: 2, right: 1 },
        Edge { start: 0, end: 1, turn: 2.0 * (a + s), left: 1, right: EXTERNAL },
        Edge { start: 1, end: 0, turn: 2.0 * (a - s), left: 2, right: EXTERNAL },
    ];
    let regions =
        vec![Region::new(EXTERNAL, Some(0.0)), Region::new(1, Some(1.0 / r1)), Region::new(2, Some(1.0 / r2))];
    Ok(Cluster::new(regions, vertices, edges)?)
}

/// Radii of the double bubble enclosing areas (a1, a2), a1 ≥ a2.
pub fn double_bubble_with_areas(a1: f64, a2: f64) -> Result<DoubleBubbleSpec, ConstructError> {
    positive("a1", a1)?;
    positive("a2", a2)?;
    if a1 < a2 {
        return Err(ConstructError::InvalidParameter(format!("need a1 >= a2, got {a1} < {a2}")));
    }
    let r0 = (0.5 * (a1 + a2)).sqrt() / k8();
    let f = |x: &[f64]| -> Result<Vec<f64>, ConstructError> {
        let c = double_bubble_any_order(x[0], x[1])?;
        Ok(vec![c.region_area(1)? / a1 - 1.0, c.region_area(2)? / a2 - 1.0])
    };
    let opts = NewtonOptions { f_tol: 1e-13, x_tol: 1e-14, ..NewtonOptions::default() };
    let out = damped_newton(f, vec![r0, r0], &opts)?;
    if !out.converged && out.residual > 1e-11 {
        return Err(ConstructError::SolveFailed {
            what: "double bubble areas",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    // a1 >= a2 forces r1 >= r2; a crossing here is round-off near equality.
    let (r1, r2) = if out.x[0] < out.x[1] || a1 == a2 {
        let m = 0.5 * (out.x[0] + out.x[1]);
        (m, m)
    } else {
        (out.x[0], out.x[1])
    };
    Ok(DoubleBubbleSpec { r1, r2 })
}

/// Symmetric standard triple bubble: three half circles of radius r and
/// three straight spokes meeting at the origin (vertex 0).
pub fn make_triple_bubble(r: f64) -> Result<Cluster, ConstructError> {
    positive("r", r)?;
    let rho = 2.0 * r / 3f64.sqrt();
    let mut vertices = vec![Point::new(0.0, 0.0)];
    for j in 0..3 {
        vertices.push(Point::from_angle(PI / 2.0 + 2.0 * PI * j as f64 / 3.0) * rho);
    }
    let mut edges = Vec::new();
    for j in 0..3u32 {
        let prev = (j + 2) % 3;
        edges.push(Edge { start: 0, end: 1 + j as usize, turn: 0.0, left: j + 1, right: prev + 1 });
    }
    for j in 0..3u32 {
        let next = (j as usize + 1) % 3;
        edges.push(Edge { start: 1 + j as usize, end: 1 + next, turn: PI, left: j + 1, right: EXTERNAL });
    }
    let mut regions = vec![Region::new(EXTERNAL, Some(0.0))];
    regions.extend((1..=3).map(|i| Region::new(i, Some(1.0 / r))));
    Ok(Cluster::new(regions, vertices, edges)?)
}

/// The explicit non-stationary competitor: quads 1 (top) and 2 (bottom),
/// triangles 3 (left) and 4 (right), central segment of length 2x.
pub fn make_competitor(x: f64, y: f64) -> Result<Cluster, ConstructError> {
    positive("x", x)?;
    positive("y", y)?;
    let s3 = 3f64.sqrt();
    let big_r = 2.0 * (x + y) / s3;
    let vertices = vec![
        Point::new(-x, 0.0),
        Point::new(x, 0.0),
        Point::new(-x - y, s3 * y),
        Point::new(-x - y, -s3 * y),
        Point::new(x + y, s3 * y),
        Point::new(x + y, -s3 * y),
    ];
    let (il, ir, tl, bl, tr, br) = (0, 1, 2, 3, 4, 5);
    let e = |start, end, turn, left, right| Edge { start, end, turn, left, right };
    let edges = vec![
        e(il, ir, 0.0, 1, 2),
        e(ir, tr, 0.0, 1, 4),
        e(ir, br, 0.0, 4, 2),
        e(il, tl, 0.0, 3, 1),
        e(il, bl, 0.0, 2, 3),
        e(tr, tl, 2.0 * PI / 3.0, 1, EXTERNAL),
        e(bl, br, 2.0 * PI / 3.0, 2, EXTERNAL),
        e(br, tr, PI, 4, EXTERNAL),
        e(tl, bl, PI, 3, EXTERNAL),
    ];
    let pq = 1.0 / big_r;
    let pt = 1.0 / (s3 * y);
    let regions = vec![
        Region::new(EXTERNAL, Some(0.0)),
        Region::new(1, Some(pq)),
        Region::new(2, Some(pq)),
        Region::new(3, Some(pt)),
        Region::new(4, Some(pt)),
    ];
    Ok(Cluster::new(regions, vertices, edges)?)
}

pub const COMPETITOR_X: f64 = 0.2707;
pub const COMPETITOR_Y: f64 = 0.394;

/// Scale coordinates by t (pressures by 1/t).
pub fn scale_cluster(c: &Cluster, t: f64) -> Result<Cluster, ConstructError> {
    positive("t", t)?;
    Ok(c.scaled(t)?)
}

/// Scale so that the smallest bounded region has area 1.
pub fn rescale_to_unit_areas(c: &Cluster) -> Result<Cluster, ConstructError> {
    let min = c.areas().values().copied().fold(f64::INFINITY, f64::min);
    scale_cluster(c, 1.0 / min.sqrt())
}

#[derive(Debug, Clone)]
pub struct GrowthSpec {
    pub host: Cluster,
    pub vertex: usize,
    pub p_new: f64,
}

impl GrowthSpec {
    pub fn grow(&self) -> Result<Cluster, ConstructError> {
        grow_triangle(&self.host, self.vertex, self.p_new)
    }
}

/// Geometry of one growth attempt around a host vertex.
struct GrowthFrame {
    host_arcs: [DirectedArc; 3],
    host_pressures: [f64; 3],
}

impl GrowthFrame {
    /// Triangle vertices relative to the host vertex and the new arcs in the
    /// same local frame, for scaled parameters u (t = u/p).
    fn layout(&self, u: &[f64], p: f64) -> Result<([Point; 3], [DirectedArc; 3]), ConstructError> {
        let mut q = [Point::default(); 3];
        for k in 0..3 {
            let t = u[k] / p;
            if !(t > 0.0 && t < self.host_arcs[k].length()) {
                return Err(ConstructError::InvalidPressure {
                    p_new: p,
                    reason: "triangle vertex leaves its host arc".into(),
                });
            }
            q[k] = self.host_arcs[k].offset_at(t);
        }
        let mut f = [DirectedArc::segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0))?; 3];
        for k in 0..3 {
            let a = q[k];
            let b = q[(k + 1) % 3];
            let kappa = p - self.host_pressures[k];
            let half = 0.5 * a.dist(b) * kappa;
            if !(half.abs() < 1.0) {
                return Err(ConstructError::InvalidPressure { p_new: p, reason: "triangle edge cannot close".into() });
            }
            f[k] = DirectedArc::new(a, b, 2.0 * half.asin())?;
        }
        Ok((q, f))
    }

    /// Sum of the three outgoing unit tangents at each triangle vertex.
    fn residual(&self, u: &[f64], p: f64) -> Result<Vec<f64>, ConstructError> {
        let (_, f) = self.layout(u, p)?;
        let mut out = Vec::with_capacity(6);
        for k in 0..3 {
            let t = u[k] / p;
            let host = Point::from_angle(self.host_arcs[k].tangent_angle_at(t));
            let next = f[k].start_tangent();
            let prev = -f[(k + 2) % 3].end_tangent();
            let s = host + next + prev;
            out.push(s.x);
            out.push(s.y);
        }
        Ok(out)
    }
}

fn host_pressure(c: &Cluster, id: RegionId) -> Result<f64, ConstructError> {
    c.pressure(id).ok_or(ConstructError::Cluster(ClusterError::PressuresUnset))
}

/// Replace a trivalent vertex by a stationary triangular region of pressure `p_new`.
pub fn grow_triangle(host: &Cluster, vertex: usize, p_new: f64) -> Result<Cluster, ConstructError> {
    if vertex >= host.vertices().len() {
        return Err(ConstructError::InvalidParameter(format!("no vertex {vertex}")));
    }
    if !p_new.is_finite() {
        return Err(ConstructError::InvalidPressure { p_new, reason: "not finite".into() });
    }
    let rot = host.rotation(vertex);
    let regions_around = [host.dart_left(rot[0]), host.dart_left(rot[1]), host.dart_left(rot[2])];
    let mut host_pressures = [0.0; 3];
    for k in 0..3 {
        host_pressures[k] = host_pressure(host, regions_around[k])?;
    }
    let p_adj = host_pressures.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if p_new <= p_adj {
        return Err(ConstructError::InvalidPressure {
            p_new,
            reason: format!("must exceed the adjacent pressures (max {p_adj})"),
        });
    }
    let frame = GrowthFrame {
        host_arcs: [host.dart_arc(rot[0]), host.dart_arc(rot[1]), host.dart_arc(rot[2])],
        host_pressures,
    };

    let opts = NewtonOptions { f_tol: 1e-13, x_tol: 1e-13, fd_step: 1e-7, fd_floor: 1e-2, ..NewtonOptions::default() };
    let solve_at = |u0: &[f64], p: f64| -> Option<Vec<f64>> {
        let out = damped_newton(|u: &[f64]| frame.residual(u, p), u0.to_vec(), &opts).ok()?;
        (out.converged || out.residual <= 1e-12).then_some(out.x)
    };

    let tiny = 1.0 / 3f64.sqrt();
    let p_start = 10.0 * p_adj.max(0.0);
    let mut u = vec![tiny; 3];
    if p_new < p_start {
        // Continuation in log p from a tiny triangle down to the target.
        let mut p = p_start;
        u = solve_at(&u, p).ok_or(ConstructError::SolveFailed {
            what: "triangle growth",
            iterations: 0,
            residual: f64::NAN,
        })?;
        let mut step = (p_start / p_new).ln() / 12.0;
        while p > p_new {
            let trial = (p * (-step).exp()).max(p_new);
            match solve_at(&u, trial) {
                Some(next) => {
                    u = next;
                    p = trial;
                    step *= 1.5;
                }
                None => {
                    step *= 0.5;
                    if step < 1e-9 {
                        return Err(ConstructError::InvalidPressure {
                            p_new,
                            reason: format!("continuation stalled at p = {p} (degenerate triangle)"),
                        });
                    }
                }
            }
        }
    } else {
        u = solve_at(&u, p_new).ok_or(ConstructError::SolveFailed {
            what: "triangle growth",
            iterations: 0,
            residual: f64::NAN,
        })?;
    }

    let (local, local_tri) = frame.layout(&u, p_new)?;
    let origin = host.vertices()[vertex];
    let q = local.map(|d| origin + d);
    let tri: Vec<f64> = local_tri.iter().map(|a| a.turn()).collect();
    let n = host.vertices().len();
    let idx = [vertex, n, n + 1];
    let mut vertices = host.vertices().to_vec();
    vertices[vertex] = q[0];
    vertices.push(q[1]);
    vertices.push(q[2]);

    let mut edges = host.edges().to_vec();
    for k in 0..3 {
        let d = rot[k];
        let t = u[k] / p_new;
        let len = frame.host_arcs[k].length();
        let e = &mut edges[d.edge];
        e.turn *= (len - t) / len;
        if d.forward {
            e.start = idx[k];
        } else {
            e.end = idx[k];
        }
    }
    let new_id = host.region_ids().into_iter().max().unwrap_or(0) + 1;
    for k in 0..3 {
        edges.push(Edge { start: idx[k], end: idx[(k + 1) % 3], turn: tri[k], left: new_id, right: regions_around[k] });
    }
    let mut regions = host.regions().to_vec();
    regions.push(Region::new(new_id, Some(p_new)));
    Ok(Cluster::new(regions, vertices, edges)?)
}

/// Common point of the three circles carrying the arcs that leave a
/// triangular face, with its distance residual and whether it lies inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concurrency {
    pub point: Point,
    pub residual: f64,
    pub inside: bool,
}

struct TriangleView {
    /// Triangle vertices in face order.
    corners: [usize; 3],
    /// Outgoing darts leaving the triangle at each corner.
    legs: [crate::cluster::Dart; 3],
}

fn triangle_view(c: &Cluster, face: usize) -> Result<TriangleView, ConstructError> {
    let f = c.faces().get(face).ok_or_else(|| ConstructError::InvalidParameter(format!("no face {face}")))?;
    if f.darts.len() != 3 {
        return Err(ConstructError::NotTriangle { edges: f.darts.len() });
    }
    let own: Vec<usize> = f.darts.iter().map(|d| d.edge).collect();
    let mut corners = [0; 3];
    let mut legs = [f.darts[0]; 3];
    for k in 0..3 {
        let v = c.dart_tail(f.darts[k]);
        corners[k] = v;
        legs[k] =
            *c.rotation(v).iter().find(|d| !own.contains(&d.edge)).ok_or(ConstructError::NotTriangle { edges: 3 })?;
    }
    Ok(TriangleView { corners, legs })
}

pub fn triangle_concurrency(c: &Cluster, face: usize) -> Result<Concurrency, ConstructError> {
    let view = triangle_view(c, face)?;
    let carriers: Vec<Carrier> = view.legs.iter().map(|&d| c.dart_arc(d).carrier()).collect();
    let center = view.corners.iter().fold(Point::default(), |s, &v| s + c.vertices()[v]) * (1.0 / 3.0);
    let poly = c.face_polygon(face);
    let tol = 1e-8 * c.vertices().iter().fold(1.0f64, |m, v| m.max(v.norm()));
    // Every circle pair meets twice; prefer concurrent points inside the face, then near it.
    let best = carriers[0]
        .intersect(&carriers[1])
        .into_iter()
        .map(|p| {
            let res = carriers.iter().map(|k| k.distance(p)).fold(0.0, f64::max);
            let inside = poly.winding_number(p) != 0;
            (p, res, inside)
        })
        .min_by(|a, b| {
            let ka = (a.1 > tol, !a.2, a.0.dist(center));
            let kb = (b.1 > tol, !b.2, b.0.dist(center));
            ka.0.cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
        });
    let Some((point, residual, inside)) = best else {
        return Err(ConstructError::NotStationaryInput { residual: f64::INFINITY });
    };
    Ok(Concurrency { point, residual, inside })
}

/// Remove a three-sided face, prolonging the three outgoing arcs to their common point.
pub fn remove_triangle(c: &Cluster, face: usize) -> Result<Cluster, ConstructError> {
    let view = triangle_view(c, face)?;
    let conc = triangle_concurrency(c, face)?;
    let scale = c.vertices().iter().fold(1.0f64, |m, v| m.max(v.norm()));
    if conc.residual > 1e-8 * scale {
        return Err(ConstructError::NotStationaryInput { residual: conc.residual });
    }
    let p = conc.point;
    let region = c.faces()[face].region;
    let own: Vec<usize> = c.faces()[face].darts.iter().map(|d| d.edge).collect();

    let keep_vertex = *view.corners.iter().min().expect("three corners");
    let mut edges = c.edges().to_vec();
    for (k, &leg) in view.legs.iter().enumerate() {
        let arc = c.dart_arc(leg);
        let w = c.vertices()[view.corners[k]];
        // Extra turn from P to the corner along the same circle.
        let chord = w - p;
        let ext = if arc.is_straight() || chord.norm() == 0.0 {
            0.0
        } else {
            let d = arc.start_tangent_angle() - chord.angle();
            2.0 * (d.sin().atan2(d.cos()))
        };
        let e = &mut edges[leg.edge];
        if leg.forward {
            e.start = keep_vertex;
            e.turn += ext;
        } else {
            e.end = keep_vertex;
            e.turn -= ext;
        }
    }
    let mut vertices = c.vertices().to_vec();
    vertices[keep_vertex] = p;

    let drop: Vec<usize> = view.corners.iter().copied().filter(|&v| v != keep_vertex).collect();
    let remap: Vec<Option<usize>> = {
        let mut next = 0;
        (0..vertices.len())
            .map(|v| {
                if drop.contains(&v) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let vertices: Vec<Point> =
        vertices.iter().enumerate().filter(|(v, _)| remap[*v].is_some()).map(|(_, p)| *p).collect();
    let edges: Vec<Edge> = edges
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !own.contains(i))
        .map(|(_, e)| Edge { start: remap[e.start].expect("kept"), end: remap[e.end].expect("kept"), ..e })
        .collect();
    let still_present = edges.iter().any(|e| e.left == region || e.right == region);
    let regions: Vec<Region> = c.regions().iter().copied().filter(|r| r.id != region || still_present).collect();
    Ok(Cluster::new(regions, vertices, edges)?)
}

/// Double bubble (r1, r2) with a triangle grown at each vertex, outer radii
/// r3 (top, region 3) and r4 (bottom, region 4). The radii r1, r2 may come in
/// either order.
pub fn make_sandwich(r1: f64, r2: f64, r3: f64, r4: f64) -> Result<Cluster, ConstructError> {
    positive("r3", r3)?;
    positive("r4", r4)?;
    let db = double_bubble_any_order(r1, r2)?;
    let top = grow_triangle(&db, 0, 1.0 / r3)?;
    grow_triangle(&top, 1, 1.0 / r4)
}

/// Face index of the (single) component of a region.
pub fn region_face(c: &Cluster, id: RegionId) -> Option<usize> {
    c.region_faces(id).first().copied()
}

/// Three-fold symmetric flower: central triangle (region 1) at `p_center`,
/// outer regions 2, 3, 4 at `p_outer`.
pub fn make_flower_symmetric(p_center: f64, p_outer: f64) -> Result<Cluster, ConstructError> {
    positive("p_outer", p_outer)?;
    if !(p_center > p_outer) {
        return Err(ConstructError::InvalidPressure {
            p_new: p_center,
            reason: format!("centre pressure must exceed outer pressure {p_outer}"),
        });
    }
    let tb = make_triple_bubble(1.0 / p_outer)?;
    let grown = grow_triangle(&tb, 0, p_center)?;
    let map: BTreeMap<RegionId, RegionId> = [(4, 1), (1, 2), (2, 3), (3, 4)].into_iter().collect();
    Ok(grown.relabel_regions(&map)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_bubble_equal() {
        let c = make_double_bubble(1.0, 1.0).unwrap();
        let k = k8();
        assert!((c.region_area(1).unwrap() - k * k).abs() < 1e-14);
        assert!((c.perimeter() - (8.0 * PI / 3.0 + 3f64.sqrt())).abs() < 1e-13);
        assert!(c.check_stationary(1e-12).unwrap().passes());
    }

    #[test]
    fn double_bubble_unequal_is_stationary() {
        let c = make_double_bubble(1.3, 0.7).unwrap();
        let rep = c.check_stationary(1e-10).unwrap();
        assert!(rep.passes(), "{rep:?}");
        let arc = c.arc(2);
        assert!((arc.radius().unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn triple_bubble_stationary() {
        let c = make_triple_bubble(1.0).unwrap();
        let rep = c.check_stationary(1e-12).unwrap();
        assert!(rep.passes(), "{rep:?}");
        let want = PI / 2.0 + 1.0 / 3f64.sqrt();
        assert!((c.region_area(2).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn competitor_builds() {
        let c = make_competitor(COMPETITOR_X, COMPETITOR_Y).unwrap();
        assert!((c.region_area(1).unwrap() - 1.000_160_355_548_095).abs() < 1e-12);
        assert!((c.region_area(3).unwrap() - 1.000_409_054_922_76).abs() < 1e-12);
        assert!((c.perimeter() - 11.196_241_530_133_65).abs() < 1e-11);
    }

    #[test]
    fn grow_on_double_bubble() {
        let db = make_double_bubble(1.0, 1.0).unwrap();
        let c = grow_triangle(&db, 0, 2.5).unwrap();
        let rep = c.check_stationary(1e-9).unwrap();
        assert!(rep.passes(), "{rep:?}");
        let f = region_face(&c, 3).unwrap();
        assert_eq!(c.faces()[f].darts.len(), 3);
        let conc = triangle_concurrency(&c, f).unwrap();
        assert!(conc.residual < 1e-9 && conc.inside, "{conc:?} {:?}", c.vertices());
        assert!(conc.point.dist(db.vertices()[0]) < 1e-9);
        let back = remove_triangle(&c, f).unwrap();
        for (a, b) in back.vertices().iter().zip(db.vertices()) {
            assert!(a.dist(*b) < 1e-9);
        }
    }
}
