use std::f64::consts::PI;

use proptest::prelude::*;
use quadbubble_core::arc_geometry::*;
use quadbubble_core::cluster::*;
use quadbubble_core::constructors::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn circle(r: f64, n: usize, c: Point) -> ArcPolygon {
    let pts: Vec<Point> = (0..n).map(|k| c + Point::from_angle(2.0 * PI * k as f64 / n as f64) * r).collect();
    let arcs = (0..n).map(|k| DirectedArc::new(pts[k], pts[(k + 1) % n], 2.0 * PI / n as f64).unwrap()).collect();
    ArcPolygon::new(arcs).unwrap()
}

#[test]
fn arc_length_examples() {
    let half = DirectedArc::new(Point::new(1.0, 0.0), Point::new(-1.0, 0.0), PI).unwrap();
    assert!((arc_length(&half) - PI).abs() < 1e-14);
    let seg = DirectedArc::segment(Point::new(0.0, 0.0), Point::new(3.0, 4.0)).unwrap();
    assert_eq!(arc_length(&seg), 5.0);
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let outer = db.edges().iter().position(|e| e.turn.abs() > PI).unwrap();
    assert!((db.arc(outer).length() - 4.0 * PI / 3.0).abs() < 1e-13);
    assert_eq!(DirectedArc::new(Point::new(1.0, 1.0), Point::new(1.0, 1.0), 0.5), Err(GeometryError::DegenerateArc));
}

#[test]
fn signed_area_examples() {
    assert!((signed_area(&circle(1.0, 2, Point::default())) - PI).abs() < 1e-14);
    let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let arcs = (0..4).map(|k| DirectedArc::segment(sq[k], sq[(k + 1) % 4]).unwrap()).collect();
    assert!((signed_area(&ArcPolygon::new(arcs).unwrap()) - 1.0).abs() < 1e-15);
    let db = make_double_bubble(1.0, 1.0).unwrap();
    assert!((db.region_area(1).unwrap() - (2.0 * PI / 3.0 + 3f64.sqrt() / 4.0)).abs() < 1e-13);
    let open = ArcPolygon::new(vec![DirectedArc::segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap()]);
    assert!(matches!(open, Err(GeometryError::OpenPath(_))));
}

#[test]
fn meeting_angle_examples() {
    let o = Point::new(0.0, 0.0);
    let a = DirectedArc::segment(o, Point::new(1.0, 0.0)).unwrap();
    let b = DirectedArc::segment(Point::new(-1.0, 0.0), o).unwrap();
    assert!((meeting_angle(&a, &b, o).unwrap() - PI).abs() < 1e-15);
    assert!(meeting_angle(&a, &a.reversed(), o).unwrap().abs() < 1e-15);
    assert_eq!(meeting_angle(&a, &b, Point::new(5.0, 5.0)), Err(GeometryError::NotIncident));
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let v = db.vertices()[0];
    let incident: Vec<DirectedArc> = db.rotation(0).iter().map(|&d| db.dart_arc(d)).collect();
    for i in 0..3 {
        let ang = meeting_angle(&incident[i], &incident[(i + 1) % 3], v).unwrap();
        assert!((ang - 2.0 * PI / 3.0).abs() < 1e-12 || (ang - 4.0 * PI / 3.0).abs() < 1e-12, "{ang}");
    }
}

#[test]
fn circle_subdivisions() {
    for n in [2, 3, 8] {
        for r in [0.3, 1.0, 7.5] {
            let p = circle(r, n, Point::new(0.4, -1.2));
            assert!(rel(p.signed_area(), PI * r * r) < 1e-12);
            assert!(rel(p.perimeter(), 2.0 * PI * r) < 1e-12);
        }
    }
}

fn arb_point() -> impl Strategy<Value = Point> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Point::new(x, y))
}

/// A closed loop through 3 to 6 points on a circle with random turns whose
/// arcs stay within the open interval (−2π, 2π).
fn arb_polygon() -> impl Strategy<Value = ArcPolygon> {
    (
        3usize..7,
        0.2..3.0f64,
        arb_point(),
        proptest::collection::vec(-2.5..2.5f64, 6),
        proptest::collection::vec(0.1..1.0f64, 6),
    )
        .prop_map(|(n, r, c, turns, gaps)| {
            let total: f64 = gaps[..n].iter().sum();
            let mut phi = 0.0;
            let pts: Vec<Point> = (0..n)
                .map(|k| {
                    let p = c + Point::from_angle(phi) * r;
                    phi += 2.0 * PI * gaps[k] / total;
                    p
                })
                .collect();
            let arcs = (0..n).map(|k| DirectedArc::new(pts[k], pts[(k + 1) % n], turns[k]).unwrap()).collect();
            ArcPolygon::new(arcs).unwrap()
        })
}

proptest! {
    #[test]
    fn scaling_laws(p in arb_polygon(), t in 0.1..10.0f64) {
        let q = p.scaled(t).unwrap();
        let a = p.signed_area();
        prop_assert!((q.signed_area() - t * t * a).abs() <= 1e-12 * (t * t * a.abs()).max(t * t));
        prop_assert!(rel(q.perimeter(), t * p.perimeter()) <= 1e-12);
    }

    #[test]
    fn splitting_is_additive(p in arb_polygon(), i in 0usize..6, s in 0.05..0.95f64) {
        let i = i % p.len();
        let len = p.arcs()[i].length();
        let q = p.split_arc(i, s * len).unwrap();
        prop_assert_eq!(q.len(), p.len() + 1);
        prop_assert!((q.signed_area() - p.signed_area()).abs() <= 1e-12 * p.perimeter().powi(2));
        prop_assert!(rel(q.perimeter(), p.perimeter()) <= 1e-12);
    }

    #[test]
    fn reversal_negates_area(p in arb_polygon()) {
        prop_assert!((p.reversed().signed_area() + p.signed_area()).abs() <= 1e-14 * p.perimeter().powi(2).max(1.0));
    }

    #[test]
    fn arc_invariants(a in arb_point(), b in arb_point(), theta in -6.2..6.2f64) {
        prop_assume!(a.dist(b) > 1e-3);
        let arc = DirectedArc::new(a, b, theta).unwrap();
        prop_assert!(arc.length() >= arc.chord_length() * (1.0 - 1e-15));
        if theta.abs() > 1e-6 {
            let r = arc.radius().unwrap();
            prop_assert!(rel(r, arc.chord_length() / (2.0 * (theta.abs() / 2.0).sin())) < 1e-10);
            let c = arc.center().unwrap();
            prop_assert!((c.dist(a) - r).abs() < 1e-9 * r.max(1.0));
            prop_assert!((c.dist(b) - r).abs() < 1e-9 * r.max(1.0));
            // Centre on the left of the chord iff θ > 0, for minor arcs; major arcs flip.
            if (theta.abs() - PI).abs() > 1e-6 {
                prop_assert_eq!((b - a).cross(c - a) > 0.0, (theta > 0.0) == (theta.abs() < PI));
            }
            prop_assert!(rel(arc.curvature(), theta / arc.length()) < 1e-12);
        }
        let rev = arc.reversed();
        prop_assert!(rel(rev.length(), arc.length()) < 1e-15);
        prop_assert!((rev.segment_area() + arc.segment_area()).abs() <= 1e-15 * arc.length().powi(2).max(1.0));
    }
}

#[test]
fn near_straight_arcs_are_continuous() {
    let a = Point::new(0.0, 0.0);
    let b = Point::new(2.0, 0.0);
    // Either side of the series threshold.
    let below = DirectedArc::new(a, b, SERIES_THRESHOLD * (1.0 - 1e-9)).unwrap();
    let above = DirectedArc::new(a, b, SERIES_THRESHOLD * (1.0 + 1e-9)).unwrap();
    assert!((below.length() - above.length()).abs() < 1e-15);
    assert!(rel(below.segment_area(), above.segment_area()) < 1e-8);
    // Segment area of a shallow arc is c²θ/12 to leading order.
    assert!(rel(below.segment_area(), 4.0 * SERIES_THRESHOLD / 12.0) < 1e-8);
    assert!(below.segment_area() > 0.0 && below.length() >= 2.0);
}

fn stationary_clusters() -> Vec<(&'static str, Cluster)> {
    let r = (PI / 2.0 + 1.0 / 3f64.sqrt()).powf(-0.5);
    vec![
        ("double(1,1)", make_double_bubble(1.0, 1.0).unwrap()),
        ("double(1.3,0.7)", make_double_bubble(1.3, 0.7).unwrap()),
        ("double(1,0.8)", make_double_bubble(1.0, 0.8).unwrap()),
        ("triple", make_triple_bubble(r).unwrap()),
        ("triple(1)", make_triple_bubble(1.0).unwrap()),
        ("sandwich", make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap()),
        ("sandwich-asym", make_sandwich(1.1, 0.9, 0.45, 0.35).unwrap()),
        ("flower", make_flower_symmetric(2.1, 1.27).unwrap()),
        ("grown", grow_triangle(&make_double_bubble(1.0, 1.0).unwrap(), 1, 2.5).unwrap()),
    ]
}

#[test]
fn stationarity_suite() {
    for (name, c) in stationary_clusters() {
        let rep = c.check_stationary(1e-9).unwrap();
        assert!(rep.max_angle_residual <= 1e-9, "{name}: angle {}", rep.max_angle_residual);
        assert!(rep.max_curvature_residual <= 1e-9, "{name}: curvature {}", rep.max_curvature_residual);
        assert!(rep.max_vertex_curvature_sum <= 1e-9, "{name}: vertex sum {}", rep.max_vertex_curvature_sum);
        assert_eq!(rep.turning_residuals.len(), c.faces().len());
        for f in 0..c.faces().len() {
            let t = c.turning_angle_residual(f).unwrap();
            assert!(t <= 1e-9, "{name}: face {f} turning residual {t}");
        }
        assert!(rep.pressure_formula_residual <= 1e-8, "{name}: pressure formula {}", rep.pressure_formula_residual);
        // Perimeter as the edge sum equals half the sum of region boundaries.
        let half: f64 = c.region_ids().iter().map(|&id| c.region_boundary_length(id)).sum::<f64>() / 2.0;
        assert!(rel(c.perimeter(), half) < 1e-12, "{name}");
    }
}

#[test]
fn competitor_is_not_stationary() {
    let c = make_competitor(COMPETITOR_X, COMPETITOR_Y).unwrap();
    let rep = c.check_stationary(1e-9).unwrap();
    assert!(!rep.passes());
    assert!((rep.max_curvature_residual - 0.1624).abs() < 5e-3, "{}", rep.max_curvature_residual);
    let p1 = c.pressure(1).unwrap();
    let p3 = c.pressure(3).unwrap();
    assert!((p1 - 1.3029).abs() < 1e-4 && (p3 - 1.4653).abs() < 1e-4);
}

#[test]
fn cluster_perimeter_examples() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    assert!((cluster_perimeter(&db) - (8.0 * PI / 3.0 + 3f64.sqrt())).abs() < 1e-13);
    let r = (PI / 2.0 + 1.0 / 3f64.sqrt()).powf(-0.5);
    let tb = make_triple_bubble(r).unwrap();
    assert!(rel(cluster_perimeter(&tb), 6.0 * (PI / 2.0 + 1.0 / 3f64.sqrt()).sqrt()) < 1e-12);
    for id in 1..=3 {
        assert!((region_area(&tb, id).unwrap() - 1.0).abs() < 1e-12);
    }
    assert_eq!(region_area(&tb, 0), Err(ClusterError::ExternalRegionArea));
    let comp = make_competitor(COMPETITOR_X, COMPETITOR_Y).unwrap();
    assert!((cluster_perimeter(&comp) - 11.19624153013365).abs() < 1e-11);
}

#[test]
fn pressure_recovery() {
    let db = make_double_bubble(1.0, 0.8).unwrap();
    let sol = solve_pressures(&db).unwrap();
    assert!((sol.pressures[&1] - 1.0).abs() < 1e-12 && (sol.pressures[&2] - 1.25).abs() < 1e-12);
    assert!(sol.residual < 1e-12);
    // Perturb one edge curvature.
    let json: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
    let mut json = json;
    let t = json["edges"][0]["turn"].as_f64().unwrap();
    let len = db.arc(0).length();
    json["edges"][0]["turn"] = serde_json::json!(t + 1e-3 * len);
    let bent = Cluster::from_json(&json.to_string()).unwrap();
    assert!(solve_pressures(&bent).unwrap().residual >= 1e-4);
}

#[test]
fn displaced_vertex_is_detected() {
    // All three double-bubble arcs share both endpoints, so moving a vertex
    // moves every chord alike and keeps the angles; use the triple bubble.
    let db = make_triple_bubble(1.0).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
    let x = json["vertices"][0]["x"].as_f64().unwrap();
    json["vertices"][0]["x"] = serde_json::json!(x + 1e-3);
    let moved = Cluster::from_json(&json.to_string()).unwrap();
    assert!(moved.check_stationary(1e-9).unwrap().max_angle_residual > 1e-4);
}

#[test]
fn turning_angle_examples() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    for f in 0..db.faces().len() {
        assert!(db.turning_angle_residual(f).unwrap() < 1e-12);
    }
    let s = make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap();
    let tri = region_face(&s, 3).unwrap();
    assert_eq!(s.faces()[tri].darts.len(), 3);
    assert!(s.turning_angle_residual(tri).unwrap() < 1e-9);
    let bare = Cluster::from_json(&strip_pressures(&db.to_json())).unwrap();
    assert_eq!(bare.turning_angle_residual(0), Err(ClusterError::PressuresUnset));
}

fn strip_pressures(json: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    for r in v["regions"].as_array_mut().unwrap() {
        r["pressure"] = serde_json::Value::Null;
    }
    v.to_string()
}

#[test]
fn scaling_clusters() {
    for (name, c) in stationary_clusters() {
        let t = 1.7;
        let s = scale_cluster(&c, t).unwrap();
        for id in c.bounded_region_ids() {
            assert!(rel(s.region_area(id).unwrap(), t * t * c.region_area(id).unwrap()) < 1e-10, "{name}");
            let (p, q) = (c.pressure(id).unwrap(), s.pressure(id).unwrap());
            assert!(rel(q, p / t) < 1e-10, "{name}");
        }
        assert!(rel(s.perimeter(), t * c.perimeter()) < 1e-10);
        let solved = s.solve_pressures().unwrap();
        for id in c.bounded_region_ids() {
            assert!(rel(solved.pressures[&id], c.pressure(id).unwrap() / t) < 1e-10, "{name}");
        }
    }
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let same = scale_cluster(&db, 1.0).unwrap();
    assert_eq!(same.to_json(), db.to_json());
    let k = k8();
    let big = scale_cluster(&db, 2.0).unwrap();
    assert!(rel(big.region_area(1).unwrap(), 4.0 * k * k) < 1e-12);
    assert!(scale_cluster(&db, -1.0).is_err());
}

#[test]
fn json_round_trip_is_bit_identical() {
    for (name, c) in stationary_clusters() {
        let text = c.to_json();
        let back = Cluster::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text, "{name}");
        assert_eq!(back.perimeter().to_bits(), c.perimeter().to_bits(), "{name}");
    }
    let comp = make_competitor(COMPETITOR_X, COMPETITOR_Y).unwrap();
    assert_eq!(Cluster::from_json(&comp.to_json()).unwrap().to_json(), comp.to_json());
    let v: serde_json::Value = serde_json::from_str(&comp.to_json()).unwrap();
    for key in ["regions", "vertices", "edges", "components"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let e = &v["edges"][0];
    for key in ["v_start", "v_end", "turn", "left_region", "right_region"] {
        assert!(e.get(key).is_some(), "missing edge field {key}");
    }
}

#[test]
fn load_rejects_broken_files() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
    v["edges"].as_array_mut().unwrap().pop();
    let err = Cluster::from_json(&v.to_string()).unwrap_err();
    assert!(matches!(err, ClusterError::NotTrivalent { .. }), "{err}");
    let mut v: serde_json::Value = serde_json::from_str(&db.to_json()).unwrap();
    v["edges"][0]["v_end"] = serde_json::json!(42);
    assert!(matches!(Cluster::from_json(&v.to_string()), Err(ClusterError::EdgeEndpoint { .. })));
    assert!(matches!(Cluster::from_json("{"), Err(ClusterError::Json(_))));
}
