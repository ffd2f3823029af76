//! Helpers shared by several integration test binaries.
#![allow(dead_code)]

use quadbubble_core::topology::LabeledMap;
use quadbubble_core::Cluster;

/// Dual edges of the five-component cases, one pair of component names per
/// edge. `P`/`C` are the big and small components of the split region, `0`
/// is the external region and `X`, `Y`, `Z` the three connected regions.
/// Derived by hand from the case analysis (split-region edge counts,
/// internal/external status, extra vertices) of the classification steps.
pub const FIXTURES: &[(&str, &str)] = &[
    ("A", "P0 PX PY PZ C0 CX CY CZ 0X 0Y ZX ZY"),
    ("B", "P0 PX PY PZ YX XZ CY CX CZ YZ Y0 Z0"),
    ("C", "C0 CZ CX CY XY XZ YZ PY PZ P0 Y0 Z0"),
    ("C'", "P0 PZ PX PY XY XZ YZ CY CZ C0 Y0 Z0"),
    ("D", "P0 PX PY PZ XY X0 Y0 CY YZ CZ C0 Z0"),
    ("D'", "C0 CX CY CZ XY X0 Y0 PY YZ PZ P0 Z0"),
    ("E", "P0 PX PY C0 CX CZ X0 Z0 Y0 XY XZ YZ"),
    ("F", "P0 PX PY XY CX CY CZ XZ YZ X0 Y0 Z0"),
    ("F'", "C0 CX CY XY PX PY PZ XZ YZ X0 Y0 Z0"),
];

/// The Step 5 configuration: case B with the split components exchanged,
/// two internal big components.
pub const STEP5: &str = "C0 CX CY CZ YX XZ PY PX PZ YZ Y0 Z0";

pub fn parse(edges: &str) -> Vec<(char, char)> {
    let mut v: Vec<(char, char)> = edges
        .split_whitespace()
        .map(|p| {
            let mut c = p.chars();
            let (a, b) = (c.next().unwrap(), c.next().unwrap());
            (a.min(b), a.max(b))
        })
        .collect();
    v.sort();
    v
}

/// Dual edges of a five-component labelled map, under every naming of
/// the three connected regions.
pub fn named_duals(m: &LabeledMap) -> Vec<Vec<(char, char)>> {
    let faces: Vec<usize> = (0..m.face_count()).collect();
    let Some(split) = faces.iter().map(|&f| m.label(f).region).find(|&r| r != 0 && m.components_of(r).len() == 2)
    else {
        return Vec::new();
    };
    let comps = m.components_of(split);
    let (p, c) = if m.label(comps[0]).big { (comps[0], comps[1]) } else { (comps[1], comps[0]) };
    let rest: Vec<usize> = faces.iter().copied().filter(|&f| f != p && f != c && f != m.external()).collect();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|perm| {
            let name = |f: usize| {
                if f == m.external() {
                    '0'
                } else if f == p {
                    'P'
                } else if f == c {
                    'C'
                } else {
                    ['X', 'Y', 'Z'][perm[rest.iter().position(|&r| r == f).unwrap()]]
                }
            };
            let mut v: Vec<(char, char)> = m
                .dual_edges()
                .into_iter()
                .map(|(a, b)| {
                    let (x, y) = (name(a), name(b));
                    (x.min(y), x.max(y))
                })
                .collect();
            v.sort();
            v
        })
        .collect()
}

pub fn matches(m: &LabeledMap, fixture: &str) -> bool {
    let want = parse(fixture);
    named_duals(m).contains(&want)
}

/// Every vertex of `a` has a partner in `b` within `tol`, and vice versa.
pub fn same_vertices(a: &Cluster, b: &Cluster, tol: f64) -> Result<(), String> {
    if a.vertices().len() != b.vertices().len() {
        return Err(format!("{} vs {} vertices", a.vertices().len(), b.vertices().len()));
    }
    for (x, y) in [(a, b), (b, a)] {
        for p in x.vertices() {
            let d = y.vertices().iter().map(|q| q.dist(*p)).fold(f64::INFINITY, f64::min);
            if d > tol {
                return Err(format!("vertex {p:?} is {d:e} from the other cluster"));
            }
        }
    }
    Ok(())
}
