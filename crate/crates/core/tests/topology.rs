use std::collections::BTreeSet;

use proptest::prelude::*;
use quadbubble_core::constructors::{make_double_bubble, make_flower_symmetric, make_sandwich, make_triple_bubble};
use quadbubble_core::topology::*;

mod common;

use common::{matches, FIXTURES, STEP5};

#[test]
fn small_counts() {
    assert_eq!(enumerate_topologies(2, 2, &PredicateSet::base()).unwrap().included.len(), 1);
    assert_eq!(enumerate_topologies(3, 3, &PredicateSet::base()).unwrap().included.len(), 1);
    assert_eq!(enumerate_topologies(4, 4, &PredicateSet::base()).unwrap().included.len(), 2);
    assert_eq!(enumerate_topologies(4, 4, &PredicateSet::paper()).unwrap().included.len(), 2);
}

#[test]
fn five_components_match_fixtures() {
    let e = enumerate_topologies(4, 5, &PredicateSet::paper()).unwrap();
    assert_eq!(e.included.len(), 9);
    let mut hit = BTreeSet::new();
    for entry in &e.included {
        let names: Vec<&str> = FIXTURES.iter().filter(|(_, f)| matches(&entry.map, f)).map(|(n, _)| *n).collect();
        assert_eq!(names.len(), 1, "{} matched {names:?}", entry.signature);
        hit.insert(names[0]);
    }
    assert_eq!(hit.len(), 9);
}

#[test]
fn dropping_internal_big_filter_restores_step5() {
    let paper = PredicateSet::paper();
    let e = enumerate_topologies(4, 5, &paper).unwrap();
    let relaxed = enumerate_topologies(4, 5, &paper.without(Predicate::AtMostOneInternalBig)).unwrap();
    assert!(relaxed.included.len() > e.included.len());
    let extra: Vec<&Entry> =
        relaxed.included.iter().filter(|r| !e.included.iter().any(|x| x.signature == r.signature)).collect();
    assert!(extra.iter().any(|r| matches(&r.map, STEP5)));
    let removed = e.excluded.iter().find(|x| matches(&x.map, STEP5)).expect("step 5 reported");
    assert_eq!(removed.excluded_by, Some(Predicate::AtMostOneInternalBig));
}

#[test]
fn enumerated_signatures_satisfy_invariants() {
    for (n, m) in [(2, 2), (3, 3), (4, 4), (4, 5)] {
        let preds = PredicateSet::paper();
        let e = enumerate_topologies(n, m, &preds).unwrap();
        let (v, edges) = euler_counts(m).unwrap();
        for entry in &e.included {
            let map = entry.map.comb_map();
            assert_eq!(map.vertex_count(), v);
            assert_eq!(map.edge_count(), edges);
            assert_eq!(map.face_count(), m + 1);
            for p in preds.active() {
                assert!(p.holds(&entry.map), "{} fails {}", entry.signature, p.name());
            }
        }
        for entry in &e.excluded {
            assert!(!entry.excluded_by.unwrap().holds(&entry.map));
        }
    }
}

#[test]
fn signature_agrees_with_brute_force_isomorphism() {
    for (n, m) in [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
        let e = enumerate_topologies(n, m, &PredicateSet::none()).unwrap();
        let all: Vec<&Entry> = e.included.iter().chain(&e.excluded).collect();
        for (i, a) in all.iter().enumerate() {
            assert!(brute_force_isomorphic(&a.map, &a.map));
            for b in &all[i + 1..] {
                assert!(!brute_force_isomorphic(&a.map, &b.map), "{} ~ {}", a.signature, b.signature);
            }
        }
    }
}

fn five_paper() -> &'static Enumeration {
    static CACHE: std::sync::OnceLock<Enumeration> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| enumerate_topologies(4, 5, &PredicateSet::paper()).unwrap())
}

/// Relabel vertices by `perm` and rotate each vertex's half-edges by `offset`.
fn relabel(m: &LabeledMap, perm: &[usize], offset: &[usize]) -> LabeledMap {
    let map = m.comb_map();
    let image = |h: usize| 3 * perm[h / 3] + (h % 3 + offset[h / 3]) % 3;
    let mut alpha = vec![0; map.half_edges()];
    for h in 0..map.half_edges() {
        alpha[image(h)] = image(map.alpha(h));
    }
    let new = CombMap::new(alpha).unwrap();
    let (face_of, count) = new.faces();
    let mut labels = vec![None; count];
    for h in 0..map.half_edges() {
        labels[face_of[image(h)]] = Some(m.label(m.face_of(h)));
    }
    let ext_h = (0..map.half_edges()).find(|&h| m.face_of(h) == m.external()).unwrap();
    LabeledMap::new(new, labels.into_iter().map(Option::unwrap).collect(), face_of[image(ext_h)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn signature_invariant_under_vertex_relabelling(
        pick in 0usize..9,
        perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        offset in proptest::collection::vec(0usize..3, 8),
    ) {
        let e = five_paper();
        let m = &e.included[pick].map;
        let r = relabel(m, &perm, &offset);
        prop_assert_eq!(r.signature(), e.included[pick].signature.clone());
        prop_assert!(brute_force_isomorphic(m, &r));
        let mirrored = mirror_of(&r);
        prop_assert!(brute_force_isomorphic(m, &mirrored));
        prop_assert_eq!(mirrored.signature(), r.signature());
    }
}

/// The mirror image with labels carried over: the face left of a mirrored
/// half-edge is the face right of the original one.
fn mirror_of(src: &LabeledMap) -> LabeledMap {
    let mirror = src.comb_map().mirrored();
    let (face_of, count) = mirror.faces();
    let mirror_index = |h: usize| 3 * (h / 3) + (3 - h % 3) % 3;
    let mut labels = vec![None; count];
    let mut external = 0;
    for h in 0..mirror.half_edges() {
        let orig = src.face_of(src.comb_map().alpha(h));
        labels[face_of[mirror_index(h)]] = Some(src.label(orig));
        if orig == src.external() {
            external = face_of[mirror_index(h)];
        }
    }
    LabeledMap::new(mirror, labels.into_iter().map(Option::unwrap).collect(), external).unwrap()
}

#[test]
fn counts_stable_across_runs() {
    for _ in 0..3 {
        let a = enumerate_topologies(4, 4, &PredicateSet::base()).unwrap();
        assert_eq!(a.signatures().len(), 2);
    }
    let a = enumerate_topologies(4, 5, &PredicateSet::paper()).unwrap().signatures();
    let b = enumerate_topologies(4, 5, &PredicateSet::paper()).unwrap().signatures();
    assert_eq!(a, b);
}

#[test]
fn cluster_signatures() {
    let sigs = enumerate_topologies(4, 4, &PredicateSet::base()).unwrap().signatures();
    let sandwich = signature_of(&make_sandwich(0.8, 0.8, 0.7, 0.7).unwrap()).unwrap();
    let flower = signature_of(&make_flower_symmetric(2.1, 1.27).unwrap()).unwrap();
    assert!(sigs.contains(&sandwich) && sigs.contains(&flower));
    assert_ne!(sandwich, flower);
    let asym = signature_of(&make_sandwich(1.1, 0.8, 0.6, 0.7).unwrap()).unwrap();
    assert_eq!(asym, sandwich);

    let theta = enumerate_topologies(2, 2, &PredicateSet::base()).unwrap().signatures();
    assert_eq!(signature_of(&make_double_bubble(1.2, 0.9).unwrap()).unwrap(), theta[0]);
    let tri = enumerate_topologies(3, 3, &PredicateSet::base()).unwrap().signatures();
    assert_eq!(signature_of(&make_triple_bubble(1.0).unwrap()).unwrap(), tri[0]);
}

#[test]
fn out_of_scope_and_bad_input() {
    assert!(matches!(enumerate_topologies(4, 7, &PredicateSet::base()), Err(TopologyError::OutOfScope { .. })));
    assert!(enumerate_topologies(5, 4, &PredicateSet::base()).is_err());
    assert!(euler_counts(1).is_err());
}

#[test]
fn json_lines_have_expected_fields() {
    let e = enumerate_topologies(4, 4, &PredicateSet::base()).unwrap();
    let line = e.included[0].to_json_line();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["regions"], 4);
    assert_eq!(v["components"], 4);
    assert!(v["excluded_by"].is_null());
    assert!(v["signature"].is_string());
}
