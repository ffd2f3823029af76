//! Directed circular arcs and closed arc paths.
//!
//! An arc is stored as its two endpoints plus the signed turn `θ` of the
//! tangent along it. `θ > 0` means the arc turns counterclockwise (for a
//! minor arc the centre then lies left of the chord), `θ = 0` is a straight
//! segment, and `|θ| > π` is a major arc.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute closure tolerance for arc paths (scaled by the coordinate magnitude).
pub const CLOSURE_TOL: f64 = 1e-12;
/// Tolerance used to decide whether a point is an arc endpoint.
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Below this |θ| lengths and segment areas use series expansions.
pub const SERIES_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate arc: endpoints coincide")]
    DegenerateArc,
    #[error("arc path is not closed (gap {0:e})")]
    OpenPath(f64),
    #[error("neither arc touches the given point")]
    NotIncident,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("turn {0} outside the open interval (-2pi, 2pi)")]
    TurnOutOfRange(f64),
    #[error("arc path is empty")]
    EmptyPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        let p = Point { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(GeometryError::NonFinite("point"))
        }
    }

    pub fn from_angle(phi: f64) -> Self {
        Point::new(phi.cos(), phi.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise rotation by `phi`.
    pub fn rotate(self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Left normal (rotation by +90 degrees).
    pub fn perp(self) -> Self {
        Point::new(-self.y, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, t: f64) -> Point {
        Point::new(self.x * t, self.y * t)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// θ/2 divided by sin(θ/2); the factor turning a chord length into an arc length.
fn half_angle_ratio(theta: f64) -> f64 {
    let t = theta.abs();
    if t < SERIES_THRESHOLD {
        1.0 + t * t / 24.0
    } else {
        (t / 2.0) / (t / 2.0).sin()
    }
}

/// θ − sin θ without cancellation for small θ.
fn theta_minus_sin(theta: f64) -> f64 {
    if theta.abs() >= 0.5 {
        return theta - theta.sin();
    }
    // θ³/3! − θ⁵/5! + θ⁷/7! − …
    let t2 = theta * theta;
    let mut term = theta * t2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    for _ in 0..10 {
        term *= -t2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

/// sin(u)/u.
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Support of an arc: the full circle it lies on, or a line for segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier {
    Circle { center: Point, radius: f64 },
    Line { point: Point, dir: Point },
}

impl Carrier {
    pub fn distance(&self, p: Point) -> f64 {
        match *self {
            Carrier::Circle { center, radius } => (p.dist(center) - radius).abs(),
            Carrier::Line { point, dir } => (p - point).cross(dir).abs(),
        }
    }

    /// All intersection points of two carriers (tangencies count once).
    pub fn intersect(&self, other: &Carrier) -> Vec<Point> {
        match (*self, *other) {
            (Carrier::Line { point: p, dir: d }, Carrier::Line { point: q, dir: e }) => {
                let den = d.cross(e);
                if den.abs() < 1e-15 {
                    return Vec::new();
                }
                let t = (q - p).cross(e) / den;
                vec![p + d * t]
            }
            (Carrier::Line { point, dir }, Carrier::Circle { center, radius })
            | (Carrier::Circle { center, radius }, Carrier::Line { point, dir }) => {
                let foot = point + dir * (center - point).dot(dir);
                let h2 = radius * radius - foot.dist(center).powi(2);
                if h2 < 0.0 {
                    return Vec::new();
                }
                let h = h2.sqrt();
                vec![foot - dir * h, foot + dir * h]
            }
            (Carrier::Circle { center: c1, radius: r1 }, Carrier::Circle { center: c2, radius: r2 }) => {
                let d = c2 - c1;
                let dist = d.norm();
                if dist < 1e-15 {
                    return Vec::new();
                }
                let a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
                let h2 = r1 * r1 - a * a;
                if h2 < 0.0 {
                    return Vec::new();
                }
                let u = d * (1.0 / dist);
                let base = c1 + u * a;
                let h = h2.sqrt();
                vec![base - u.perp() * h, base + u.perp() * h]
            }
        }
    }
}

/// A directed circular arc or straight segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedArc {
    start: Point,
    end: Point,
    turn: f64,
}

impl DirectedArc {
    pub fn new(start: Point, end: Point, turn: f64) -> Result<Self, GeometryError> {
        if !start.is_finite() || !end.is_finite() {
            return Err(GeometryError::NonFinite("arc endpoint"));
        }
        if !turn.is_finite() {
            return Err(GeometryError::NonFinite("arc turn"));
        }
        if turn.abs() >= TAU {
            return Err(GeometryError::TurnOutOfRange(turn));
        }
        if start.dist(end) == 0.0 {
            return Err(GeometryError::DegenerateArc);
        }
        Ok(DirectedArc { start, end, turn })
    }

    pub fn segment(start: Point, end: Point) -> Result<Self, GeometryError> {
        DirectedArc::new(start, end, 0.0)
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn end(&self) -> Point {
        self.end
    }

    pub fn turn(&self) -> f64 {
        self.turn
    }

    pub fn is_straight(&self) -> bool {
        self.turn == 0.0
    }

    pub fn chord(&self) -> Point {
        self.end - self.start
    }

    pub fn chord_length(&self) -> f64 {
        self.chord().norm()
    }

    pub fn chord_angle(&self) -> f64 {
        self.chord().angle()
    }

    pub fn length(&self) -> f64 {
        self.chord_length() * half_angle_ratio(self.turn)
    }

    /// Signed curvature θ / length.
    pub fn curvature(&self) -> f64 {
        if self.turn == 0.0 {
            0.0
        } else {
            self.turn / self.length()
        }
    }

    pub fn radius(&self) -> Option<f64> {
        if self.turn == 0.0 {
            None
        } else {
            Some(self.chord_length() / (2.0 * (self.turn.abs() / 2.0).sin()))
        }
    }

    pub fn center(&self) -> Option<Point> {
        if self.turn == 0.0 {
            return None;
        }
        let c = self.chord_length();
        let u = self.chord() * (1.0 / c);
        let mid = (self.start + self.end) * 0.5;
        Some(mid + u.perp() * (0.5 * c / (self.turn / 2.0).tan()))
    }

    pub fn carrier(&self) -> Carrier {
        match (self.center(), self.radius()) {
            (Some(center), Some(radius)) => Carrier::Circle { center, radius },
            _ => Carrier::Line { point: self.start, dir: self.chord() * (1.0 / self.chord_length()) },
        }
    }

    pub fn start_tangent_angle(&self) -> f64 {
        self.chord_angle() - self.turn / 2.0
    }

    pub fn end_tangent_angle(&self) -> f64 {
        self.chord_angle() + self.turn / 2.0
    }

    pub fn start_tangent(&self) -> Point {
        Point::from_angle(self.start_tangent_angle())
    }

    pub fn end_tangent(&self) -> Point {
        Point::from_angle(self.end_tangent_angle())
    }

    /// Signed area between the arc and its chord, positive when the arc turns left.
    pub fn segment_area(&self) -> f64 {
        let c2 = self.chord().dot(self.chord());
        let t = self.turn;
        if t.abs() < SERIES_THRESHOLD {
            c2 * t / 12.0 * (1.0 + t * t / 30.0)
        } else {
            let s = (t / 2.0).sin();
            c2 / 8.0 * theta_minus_sin(t) / (s * s)
        }
    }

    pub fn reversed(&self) -> DirectedArc {
        DirectedArc { start: self.end, end: self.start, turn: -self.turn }
    }

    /// Point at arclength `s` from the start.
    pub fn point_at(&self, s: f64) -> Point {
        self.start + self.offset_at(s)
    }

    /// Displacement from the start to the point at arclength `s`, without
    /// the cancellation of subtracting two nearby absolute positions.
    pub fn offset_at(&self, s: f64) -> Point {
        let half = 0.5 * self.curvature() * s;
        let phi = self.start_tangent_angle() + half;
        Point::from_angle(phi) * (s * sinc(half))
    }

    pub fn tangent_angle_at(&self, s: f64) -> f64 {
        self.start_tangent_angle() + self.curvature() * s
    }

    /// Split at arclength `s` (strictly inside the arc).
    pub fn split_at(&self, s: f64) -> Result<(DirectedArc, DirectedArc), GeometryError> {
        let len = self.length();
        let frac = s / len;
        let mid = self.point_at(s);
        let a = DirectedArc::new(self.start, mid, self.turn * frac)?;
        let b = DirectedArc::new(mid, self.end, self.turn * (1.0 - frac))?;
        Ok((a, b))
    }

    pub fn scaled(&self, t: f64) -> Result<DirectedArc, GeometryError> {
        DirectedArc::new(self.start * t, self.end * t, self.turn)
    }

    /// `n + 1` points evenly spaced in arclength, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        let len = self.length();
        let mut pts: Vec<Point> = (0..n).map(|k| self.point_at(len * k as f64 / n as f64)).collect();
        pts.push(self.end);
        pts
    }

    fn touches(&self, p: Point, q: Point) -> bool {
        p.dist(q) <= INCIDENCE_TOL * (1.0 + q.norm())
    }

    /// Direction angle of the tangent pointing away from `at` into the arc.
    pub fn outgoing_angle(&self, at: Point) -> Result<f64, GeometryError> {
        if self.touches(self.start, at) {
            Ok(self.start_tangent_angle())
        } else if self.touches(self.end, at) {
            Ok(self.end_tangent_angle() + PI)
        } else {
            Err(GeometryError::NotIncident)
        }
    }
}

pub fn arc_length(arc: &DirectedArc) -> f64 {
    arc.length()
}

/// Reduce an angle to [0, 2π).
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counterclockwise angle from the outgoing tangent of `a` to that of `b` at `at`.
pub fn meeting_angle(a: &DirectedArc, b: &DirectedArc, at: Point) -> Result<f64, GeometryError> {
    let pa = a.outgoing_angle(at)?;
    let pb = b.outgoing_angle(at)?;
    Ok(normalize_angle(pb - pa))
}

/// A closed loop of arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPolygon {
    arcs: Vec<DirectedArc>,
}

impl ArcPolygon {
    pub fn new(arcs: Vec<DirectedArc>) -> Result<Self, GeometryError> {
        if arcs.is_empty() {
            return Err(GeometryError::EmptyPath);
        }
        for i in 0..arcs.len() {
            let a = arcs[i].end();
            let b = arcs[(i + 1) % arcs.len()].start();
            let gap = a.dist(b);
            if gap > CLOSURE_TOL * (1.0 + a.norm()) {
                return Err(GeometryError::OpenPath(gap));
            }
        }
        Ok(ArcPolygon { arcs })
    }

    pub fn arcs(&self) -> &[DirectedArc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.arcs.iter().map(DirectedArc::length).sum()
    }

    pub fn signed_area(&self) -> f64 {
        let o = self.arcs[0].start();
        let shoelace: f64 = self.arcs.iter().map(|a| (a.start() - o).cross(a.end() - o)).sum();
        let segments: f64 = self.arcs.iter().map(DirectedArc::segment_area).sum();
        0.5 * shoelace + segments
    }

    pub fn reversed(&self) -> ArcPolygon {
        ArcPolygon { arcs: self.arcs.iter().rev().map(DirectedArc::reversed).collect() }
    }

    pub fn scaled(&self, t: f64) -> Result<ArcPolygon, GeometryError> {
        let arcs = self.arcs.iter().map(|a| a.scaled(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(ArcPolygon { arcs })
    }

    /// Replace arc `i` by its two halves split at arclength `s`.
    pub fn split_arc(&self, i: usize, s: f64) -> Result<ArcPolygon, GeometryError> {
        let (a, b) = self.arcs[i].split_at(s)?;
        let mut arcs = self.arcs.clone();
        arcs.splice(i..=i, [a, b]);
        Ok(ArcPolygon { arcs })
    }

    /// Winding number of the loop around `p`, from a fine polygonal sample.
    pub fn winding_number(&self, p: Point) -> i32 {
        let mut total = 0.0;
        for arc in &self.arcs {
            let pts = arc.sample(64);
            for w in pts.windows(2) {
                let a = w[0] - p;
                let b = w[1] - p;
                total += a.cross(b).atan2(a.dot(b));
            }
        }
        (total / TAU).round() as i32
    }
}

pub fn signed_area(poly: &ArcPolygon) -> f64 {
    poly.signed_area()
}
