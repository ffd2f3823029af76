use std::f64::consts::PI;

use quadbubble_core::bounds::{double_bubble_pressure_bounds, AreaVector};
use quadbubble_core::constructors::*;
use quadbubble_core::solver::solve_flower_equal_areas;
use quadbubble_core::topology::signature_of;
use quadbubble_core::{Cluster, Point};

mod common;

use common::same_vertices;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn double_bubble_examples() {
    let c = make_double_bubble(1.0, 1.0).unwrap();
    let k = k8();
    assert!((c.region_area(1).unwrap() - 2.5274078).abs() < 1e-7);
    assert!((c.perimeter() - 10.1096312).abs() < 1e-7);
    let straight = c.edges().iter().position(|e| e.turn == 0.0).expect("straight interface");
    assert!((c.arc(straight).length() - 3f64.sqrt()).abs() < 1e-13);
    for r in [0.5, 2.0] {
        let c = make_double_bubble(r, r).unwrap();
        for id in [1, 2] {
            assert!(rel(c.region_area(id).unwrap(), k * k * r * r) < 1e-12);
        }
    }
    let c = make_double_bubble(1.0, 0.8).unwrap();
    assert!(c.region_area(1).unwrap() > c.region_area(2).unwrap());
    assert!((c.pressure(1).unwrap() - 1.0).abs() < 1e-15 && (c.pressure(2).unwrap() - 1.25).abs() < 1e-15);
    assert!(make_double_bubble(0.0, 1.0).is_err());
}

#[test]
fn double_bubble_monotonicity_by_finite_differences() {
    let r2 = 1.0;
    let radii = [1.0, 1.2, 1.5, 2.0, 3.0];
    let h = 1e-6;
    for r1 in radii {
        let lo = make_double_bubble(r1, r2).unwrap();
        let hi = make_double_bubble(r1 + h, r2).unwrap();
        let d1 = (hi.region_area(1).unwrap() - lo.region_area(1).unwrap()) / h;
        let d2 = (hi.region_area(2).unwrap() - lo.region_area(2).unwrap()) / h;
        assert!(d1 > 0.0, "area 1 not increasing at r1 = {r1}: {d1}");
        assert!(d2 < 0.0, "area 2 not decreasing at r1 = {r1}: {d2}");
    }
}

#[test]
fn double_bubble_with_areas_examples() {
    let k = k8();
    let s = double_bubble_with_areas(k * k, k * k).unwrap();
    assert!((s.r1 - 1.0).abs() < 1e-10 && (s.r2 - 1.0).abs() < 1e-10);
    let s = double_bubble_with_areas(1.0, 1.0).unwrap();
    assert!((s.r1 - 1.0 / k).abs() < 1e-10);
    assert!((s.build().unwrap().perimeter() - (8.0 * PI / 3.0 + 3f64.sqrt()) / k).abs() < 1e-9);
}

#[test]
fn double_bubble_pressure_bounds_grid() {
    let cases = [
        (1.0, 1.0),
        (2.0, 1.0),
        (1.5, 1.0),
        (3.0, 1.0),
        (1.2, 0.8),
        (5.0, 0.5),
        (2.5274, 2.0),
        (1.0, 0.1),
        (4.0, 3.9),
        (10.0, 1.0),
    ];
    let k = k8();
    for (a1, a2) in cases {
        let spec = double_bubble_with_areas(a1, a2).unwrap();
        let c = spec.build().unwrap();
        assert!(rel(c.region_area(1).unwrap(), a1) < 1e-10 && rel(c.region_area(2).unwrap(), a2) < 1e-10);
        let (p1, p2) = spec.pressures();
        let eps = 1e-12;
        assert!(k / a1.sqrt() <= p1 + eps, "({a1},{a2}) lower");
        assert!(p1 <= p2 + eps, "({a1},{a2}) order");
        assert!(p2 <= k / a2.sqrt() + eps, "({a1},{a2}) upper");
        let (lo, hi) = double_bubble_pressure_bounds(&AreaVector::new(vec![a1, a2]).unwrap(), 1, 2).unwrap();
        assert!(lo <= p1 + eps && p2 <= hi + eps);
    }
}

#[test]
fn triple_bubble_examples() {
    let r = (PI / 2.0 + 1.0 / 3f64.sqrt()).powf(-0.5);
    assert!((r - 0.68229).abs() < 1e-5);
    let c = make_triple_bubble(r).unwrap();
    let want = 6.0 * (PI / 2.0 + 1.0 / 3f64.sqrt()).sqrt();
    assert!(rel(c.perimeter(), want) < 1e-12);
    assert!(c.perimeter() >= 8.7939);
    assert!((make_triple_bubble(1.0).unwrap().region_area(1).unwrap() - 2.1481466).abs() < 1e-7);
    let law = |r: f64| {
        let c = make_triple_bubble(r).unwrap();
        c.perimeter() / c.areas().values().sum::<f64>().sqrt()
    };
    assert!(rel(law(0.3), law(4.0)) < 1e-12);
}

#[test]
fn competitor_examples() {
    let c = make_competitor(COMPETITOR_X, COMPETITOR_Y).unwrap();
    let y = COMPETITOR_Y;
    let tri = y * y * (3f64.sqrt() + 1.5 * PI);
    assert!(rel(c.region_area(3).unwrap(), tri) < 1e-12 && rel(c.region_area(4).unwrap(), tri) < 1e-12);
    assert!((c.region_area(1).unwrap() - 1.00016).abs() < 1e-5);
    assert!((c.perimeter() - 11.19624).abs() < 1e-5);
    let unit = rescale_to_unit_areas(&c).unwrap();
    let min = unit.areas().values().copied().fold(f64::INFINITY, f64::min);
    assert!((min - 1.0).abs() < 1e-12);
    assert!(unit.areas().values().all(|&a| a >= 1.0 - 1e-12));
    assert!((unit.perimeter() - 11.1953).abs() < 1e-4 && unit.perimeter() <= 11.1962);
}

#[test]
fn grow_remove_round_trip_grid() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let da = make_double_bubble(1.3, 0.7).unwrap();
    let tb = make_triple_bubble(1.0).unwrap();
    let sw = make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap();
    let cases: Vec<(&str, &Cluster, usize, f64)> = vec![
        ("db v0 2.5", &db, 0, 2.5),
        ("db v1 4", &db, 1, 4.0),
        ("db v0 1.6", &db, 0, 1.6),
        ("da v0 3", &da, 0, 3.0),
        ("da v1 3.5", &da, 1, 3.5),
        ("tb v0 3", &tb, 0, 3.0),
        ("tb v1 2.5", &tb, 1, 2.5),
        ("tb v2 6", &tb, 2, 6.0),
        ("sw v0 5", &sw, 0, 5.0),
        ("sw v3 4", &sw, 3, 4.0),
    ];
    for (name, host, v, p) in cases {
        let grown = grow_triangle(host, v, p).unwrap_or_else(|e| panic!("{name}: {e}"));
        let rep = grown.check_stationary(1e-9).unwrap();
        assert!(rep.passes(), "{name}: {rep:?}");
        let new_id = *grown.region_ids().iter().max().unwrap();
        let f = region_face(&grown, new_id).unwrap();
        assert_eq!(grown.faces()[f].darts.len(), 3, "{name}");
        let conc = triangle_concurrency(&grown, f).unwrap();
        assert!(conc.residual <= 1e-9 && conc.inside, "{name}: {conc:?}");
        assert!(conc.point.dist(host.vertices()[v]) <= 1e-9, "{name}");
        let back = remove_triangle(&grown, f).unwrap();
        same_vertices(&back, host, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
        for id in host.bounded_region_ids() {
            assert!(rel(back.region_area(id).unwrap(), host.region_area(id).unwrap()) < 1e-9, "{name}");
            assert_eq!(back.pressure(id), host.pressure(id), "{name}");
        }

        // Converse: remove then regrow at the merged vertex.
        let at = back
            .vertices()
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.dist(conc.point).total_cmp(&b.1.dist(conc.point)))
            .map(|(i, _)| i)
            .unwrap();
        let again = grow_triangle(&back, at, p).unwrap();
        same_vertices(&again, &grown, 1e-9).unwrap_or_else(|e| panic!("{name} converse: {e}"));
    }
}

#[test]
fn grown_area_decreases_with_pressure() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let area = |p: f64| {
        let g = grow_triangle(&db, 0, p).unwrap();
        g.region_area(*g.region_ids().iter().max().unwrap()).unwrap()
    };
    assert!(area(2.0) > area(2.5));
    let far = grow_triangle(&db, 0, 1e6).unwrap();
    let new_id = *far.region_ids().iter().max().unwrap();
    assert!(far.region_area(new_id).unwrap() < 1e-10);
    let f = region_face(&far, new_id).unwrap();
    for d in &far.faces()[f].darts {
        assert!(far.vertices()[far.dart_tail(*d)].dist(db.vertices()[0]) <= 1e-6);
    }
}

#[test]
fn growth_rejects_bad_inputs() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    assert!(matches!(grow_triangle(&db, 9, 3.0), Err(ConstructError::InvalidParameter(_))));
    assert!(matches!(grow_triangle(&db, 0, 0.5), Err(ConstructError::InvalidPressure { .. })));
    assert!(matches!(grow_triangle(&db, 0, f64::NAN), Err(ConstructError::InvalidPressure { .. })));
    let outer = db.faces().iter().position(|f| f.region == 1).unwrap();
    assert!(matches!(remove_triangle(&db, outer), Err(ConstructError::NotTriangle { edges: 2 })));
}

#[test]
fn removing_flower_centre_gives_triple_bubble() {
    let flower = solve_flower_equal_areas().unwrap().cluster;
    let centre = region_face(&flower, 1).unwrap();
    let tb = remove_triangle(&flower, centre).unwrap();
    assert_eq!(tb.bounded_region_ids(), vec![2, 3, 4]);
    let areas: Vec<f64> = tb.bounded_region_ids().iter().map(|&id| tb.region_area(id).unwrap()).collect();
    for a in &areas {
        assert!((a - 4.0 / 3.0).abs() < 1e-8, "{areas:?}");
    }
    let r = (4.0 / 3.0 / (PI / 2.0 + 1.0 / 3f64.sqrt())).sqrt();
    let reference = make_triple_bubble(r).unwrap();
    assert!(rel(tb.perimeter(), reference.perimeter()) < 1e-8);
    assert!(tb.check_stationary(1e-8).unwrap().passes());
}

#[test]
fn removing_a_sandwich_triangle_keeps_pressures() {
    let sw = make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap();
    let f = region_face(&sw, 3).unwrap();
    let reduced = remove_triangle(&sw, f).unwrap();
    assert_eq!(reduced.bounded_region_ids(), vec![1, 2, 4]);
    for id in [1, 2, 4] {
        assert_eq!(reduced.pressure(id), sw.pressure(id));
        assert!(reduced.region_area(id).unwrap() >= sw.region_area(id).unwrap() - 1e-12);
    }
    assert!(reduced.check_stationary(1e-9).unwrap().passes());
    let areas: Vec<f64> = [1, 2, 4].iter().map(|&id| reduced.region_area(id).unwrap()).collect();
    let (lo, hi) = double_bubble_pressure_bounds(&AreaVector::new(areas).unwrap(), 1, 2).unwrap();
    let (p1, p2) = (reduced.pressure(1).unwrap(), reduced.pressure(2).unwrap());
    assert!(lo > 0.0 && lo < hi);
    assert!(p1.min(p2) > 0.0 && p1.max(p2).is_finite());
}

#[test]
fn sandwich_symmetry_and_topology() {
    let s = make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap();
    assert!(rel(s.region_area(1).unwrap(), s.region_area(2).unwrap()) < 1e-9);
    assert!(rel(s.region_area(3).unwrap(), s.region_area(4).unwrap()) < 1e-9);
    let mut counts: Vec<usize> = (1..=4).map(|id| s.faces()[region_face(&s, id).unwrap()].darts.len()).collect();
    counts.sort();
    assert_eq!(counts, vec![3, 3, 4, 4]);
    let swapped = s.relabel_regions(&[(0, 0), (1, 2), (2, 1), (3, 4), (4, 3)].into_iter().collect()).unwrap();
    assert_eq!(signature_of(&swapped).unwrap(), signature_of(&s).unwrap());
    let mirrored = Cluster::from_json(&mirror_json(&s)).unwrap();
    assert_eq!(signature_of(&mirrored).unwrap(), signature_of(&s).unwrap());
}

/// Reflect in the x-axis: y ↦ −y, turns negate, left/right swap.
fn mirror_json(c: &Cluster) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    for p in v["vertices"].as_array_mut().unwrap() {
        p["y"] = serde_json::json!(-p["y"].as_f64().unwrap());
    }
    for e in v["edges"].as_array_mut().unwrap() {
        e["turn"] = serde_json::json!(-e["turn"].as_f64().unwrap());
        let (l, r) = (e["left_region"].clone(), e["right_region"].clone());
        e["left_region"] = r;
        e["right_region"] = l;
    }
    v.as_object_mut().unwrap().remove("components");
    v.to_string()
}

#[test]
fn flower_examples() {
    for (pc, po) in [(2.1, 1.27), (3.0, 1.0), (2.5, 1.5), (4.0, 2.0)] {
        let f = make_flower_symmetric(pc, po).unwrap();
        let rep = f.check_stationary(1e-10).unwrap();
        assert!(rep.passes(), "({pc},{po}) {rep:?}");
        let outer: Vec<f64> = [2, 3, 4].iter().map(|&id| f.region_area(id).unwrap()).collect();
        assert!((outer[0] - outer[1]).abs() < 1e-12 && (outer[1] - outer[2]).abs() < 1e-12, "{outer:?}");
        assert_eq!(f.faces()[region_face(&f, 1).unwrap()].darts.len(), 3);
    }
    assert!(matches!(make_flower_symmetric(1.0, 1.0), Err(ConstructError::InvalidPressure { .. })));
    let sw = signature_of(&make_sandwich(1.0, 1.0, 0.4, 0.4).unwrap()).unwrap();
    assert_ne!(signature_of(&make_flower_symmetric(2.1, 1.27).unwrap()).unwrap(), sw);
}

#[test]
fn scale_examples() {
    let db = make_double_bubble(1.0, 1.0).unwrap();
    let twice = scale_cluster(&db, 2.0).unwrap();
    let k = k8();
    assert!(rel(twice.region_area(1).unwrap(), 4.0 * k * k) < 1e-12);
    assert_eq!(twice.vertices()[0], Point::new(db.vertices()[0].x * 2.0, db.vertices()[0].y * 2.0));
}
