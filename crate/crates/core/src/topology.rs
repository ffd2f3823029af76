//! Trivalent planar maps with region-labelled faces: enumeration,
//! canonical signatures and the combinatorial filters used to classify
//! candidate cluster topologies.
//!
//! Half-edges of vertex `v` are `3v, 3v+1, 3v+2` in counterclockwise
//! order, so the rotation is implicit and a map is just its pairing
//! `alpha`. The face to the left of half-edge `h` continues with
//! `sigma⁻¹(alpha(h))`, the same rule the cluster model uses.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cluster::{Cluster, Dart, RegionId, EXTERNAL};

pub const MAX_COMPONENTS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("{components} components is out of scope (at most {MAX_COMPONENTS})")]
    OutOfScope { components: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotTrivalent { vertex: usize, degree: usize },
}

/// (vertices, edges) of a bridgeless trivalent cluster with `m` bounded components.
pub fn euler_counts(m: usize) -> Result<(usize, usize), TopologyError> {
    if m < 2 {
        return Err(TopologyError::InvalidInput(format!("need at least 2 components, got {m}")));
    }
    Ok((2 * (m - 1), 3 * (m - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombMap {
    alpha: Vec<usize>,
}

impl CombMap {
    pub fn new(alpha: Vec<usize>) -> Result<Self, TopologyError> {
        let n = alpha.len();
        if n == 0 || n % 3 != 0 {
            return Err(TopologyError::InvalidInput(format!("{n} half-edges is not a positive multiple of 3")));
        }
        for (h, &a) in alpha.iter().enumerate() {
            if a >= n || a == h || alpha[a] != h {
                return Err(TopologyError::InvalidInput(format!(
                    "pairing is not a fixed-point-free involution at {h}"
                )));
            }
        }
        let map = CombMap { alpha };
        if !map.is_connected() {
            return Err(TopologyError::InvalidInput("map is not connected".into()));
        }
        Ok(map)
    }

    pub fn half_edges(&self) -> usize {
        self.alpha.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alpha.len() / 3
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn alpha(&self, h: usize) -> usize {
        self.alpha[h]
    }

    pub fn sigma(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 1) % 3
    }

    pub fn sigma_inv(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 2) % 3
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        h / 3
    }

    /// Face index of every half-edge (face on its left) and the face count.
    /// Faces are numbered by their smallest half-edge.
    pub fn faces(&self) -> (Vec<usize>, usize) {
        let n = self.alpha.len();
        let mut face = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if face[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            while face[h] == usize::MAX {
                face[h] = count;
                h = self.sigma_inv(self.alpha[h]);
            }
            count += 1;
        }
        (face, count)
    }

    pub fn face_count(&self) -> usize {
        self.faces().1
    }

    fn is_connected(&self) -> bool {
        let v = self.vertex_count();
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for i in 0..3 {
                let y = self.alpha[3 * x + i] / 3;
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_planar(&self) -> bool {
        self.vertex_count() + self.face_count() == self.edge_count() + 2
    }

    pub fn has_loop(&self) -> bool {
        (0..self.alpha.len()).any(|h| self.alpha[h] / 3 == h / 3)
    }

    /// In a planar map an edge is a bridge iff it has the same face on both sides.
    pub fn has_bridge(&self) -> bool {
        let (face, _) = self.faces();
        (0..self.alpha.len()).any(|h| face[h] == face[self.alpha[h]])
    }

    /// Relabelling of half-edges that turns the mirror image back into the
    /// standard counterclockwise layout.
    fn mirror_index(h: usize) -> usize {
        3 * (h / 3) + (3 - h % 3) % 3
    }

    pub fn mirrored(&self) -> CombMap {
        let mut alpha = vec![0; self.alpha.len()];
        for h in 0..self.alpha.len() {
            alpha[Self::mirror_index(h)] = Self::mirror_index(self.alpha[h]);
        }
        CombMap { alpha }
    }

    /// Traversal from `root`: half-edges in discovery order and, for each,
    /// the discovery number of its partner.
    fn rooted_code(alpha: &[usize], root: usize) -> (Vec<u32>, Vec<usize>) {
        let n = alpha.len();
        let mut index = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let discover = |h: usize, index: &mut Vec<usize>, order: &mut Vec<usize>| {
            for k in 0..3 {
                let x = 3 * (h / 3) + (h % 3 + k) % 3;
                index[x] = order.len();
                order.push(x);
            }
        };
        discover(root, &mut index, &mut order);
        let mut code = Vec::with_capacity(n);
        let mut i = 0;
        while i < order.len() {
            let a = alpha[order[i]];
            if index[a] == usize::MAX {
                discover(a, &mut index, &mut order);
            }
            code.push(index[a] as u32);
            i += 1;
        }
        (code, order)
    }
}

/// A map seen from one orientation: its pairing and, per half-edge, the
/// face of the original map lying on its left.
#[derive(Debug, Clone)]
struct Oriented {
    alpha: Vec<usize>,
    face: Vec<usize>,
}

/// Minimal structural code and every (orientation, traversal order) achieving it.
#[derive(Debug, Clone)]
struct CanonFrames {
    code: Vec<u32>,
    frames: Vec<(usize, Vec<usize>)>,
    oriented: [Oriented; 2],
}

fn canon_frames(map: &CombMap, face_of: &[usize]) -> CanonFrames {
    let mirror = map.mirrored();
    let mut mirror_face = vec![0; face_of.len()];
    for h in 0..face_of.len() {
        mirror_face[CombMap::mirror_index(h)] = face_of[map.alpha[h]];
    }
    let oriented = [
        Oriented { alpha: map.alpha.clone(), face: face_of.to_vec() },
        Oriented { alpha: mirror.alpha, face: mirror_face },
    ];
    let mut best: Option<Vec<u32>> = None;
    let mut frames = Vec::new();
    for (o, or) in oriented.iter().enumerate() {
        for root in 0..or.alpha.len() {
            let (code, order) = CombMap::rooted_code(&or.alpha, root);
            match best.as_ref().map(|b| code.cmp(b)) {
                None | Some(std::cmp::Ordering::Less) => {
                    best = Some(code);
                    frames.clear();
                    frames.push((o, order));
                }
                Some(std::cmp::Ordering::Equal) => frames.push((o, order)),
                Some(std::cmp::Ordering::Greater) => {}
            }
        }
    }
    CanonFrames { code: best.expect("non-empty map"), frames, oriented }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FaceLabel {
    pub region: RegionId,
    /// The designated big component of its region (always false for region 0).
    pub big: bool,
}

/// A trivalent planar map with a region on every face and a marked external face.
#[derive(Debug, Clone)]
pub struct LabeledMap {
    map: CombMap,
    face_of: Vec<usize>,
    labels: Vec<FaceLabel>,
    external: usize,
    degree: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl LabeledMap {
    /// `labels` is indexed by the face numbering of [`CombMap::faces`].
    pub fn new(map: CombMap, labels: Vec<FaceLabel>, external: usize) -> Result<Self, TopologyError> {
        let (face_of, count) = map.faces();
        if labels.len() != count {
            return Err(TopologyError::InvalidInput(format!("{} labels for {count} faces", labels.len())));
        }
        if external >= count || labels[external].region != EXTERNAL {
            return Err(TopologyError::InvalidInput("external face must carry region 0".into()));
        }
        let mut degree = vec![0; count];
        let mut adjacency = vec![vec![0; count]; count];
        for h in 0..map.half_edges() {
            degree[face_of[h]] += 1;
            adjacency[face_of[h]][face_of[map.alpha(h)]] += 1;
        }
        Ok(LabeledMap { map, face_of, labels, external, degree, adjacency })
    }

    pub fn comb_map(&self) -> &CombMap {
        &self.map
    }

    pub fn face_count(&self) -> usize {
        self.labels.len()
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    pub fn label(&self, face: usize) -> FaceLabel {
        self.labels[face]
    }

    pub fn external(&self) -> usize {
        self.external
    }

    pub fn degree(&self, face: usize) -> usize {
        self.degree[face]
    }

    /// Number of edges shared by two faces.
    pub fn shared_edges(&self, f: usize, g: usize) -> usize {
        self.adjacency[f][g]
    }

    pub fn is_internal(&self, face: usize) -> bool {
        face != self.external && self.adjacency[face][self.external] == 0
    }

    /// Bounded components, M.
    pub fn bounded_count(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn region_count(&self) -> usize {
        let mut r: Vec<RegionId> = self.labels.iter().map(|l| l.region).filter(|&r| r != EXTERNAL).collect();
        r.sort_unstable();
        r.dedup();
        r.len()
    }

    pub fn components_of(&self, region: RegionId) -> Vec<usize> {
        (0..self.labels.len()).filter(|&f| self.labels[f].region == region).collect()
    }

    /// Unordered face pairs, one per edge.
    pub fn dual_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.map.half_edges())
            .filter(|&h| h < self.map.alpha(h))
            .map(|h| {
                let (a, b) = (self.face_of[h], self.face_of[self.map.alpha(h)]);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn signature(&self) -> TopologySignature {
        let frames = canon_frames(&self.map, &self.face_of);
        signature_from_frames(&frames, &self.labels, self.external, self.region_count(), self.bounded_count())
    }
}

fn label_code(labels: &[FaceLabel], external: usize, oriented: &Oriented, order: &[usize]) -> Vec<u32> {
    let mut remap: HashMap<RegionId, u32> = HashMap::new();
    order
        .iter()
        .map(|&h| {
            let f = oriented.face[h];
            let l = labels[f];
            let r = if l.region == EXTERNAL {
                0
            } else {
                let next = remap.len() as u32 + 1;
                *remap.entry(l.region).or_insert(next)
            };
            (r * 2 + l.big as u32) * 2 + (f == external) as u32
        })
        .collect()
}

fn signature_from_frames(
    frames: &CanonFrames,
    labels: &[FaceLabel],
    external: usize,
    regions: usize,
    components: usize,
) -> TopologySignature {
    let labels_code = frames
        .frames
        .iter()
        .map(|(o, order)| label_code(labels, external, &frames.oriented[*o], order))
        .min()
        .expect("at least one frame");
    let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    TopologySignature(format!("N{regions}M{components}:{}/{}", join(&frames.code), join(&labels_code)))
}

/// Canonical text of a labelled map, invariant under vertex relabelling,
/// rotation, reflection and permutation of the bounded regions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TopologySignature(String);

impl TopologySignature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TopologySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    /// With more than two regions every component (E₀ included) has at least 3 edges.
    MinEdges,
    /// A component of a k-component region has at most M+1−k edges, at most M−k if internal.
    MaxEdges,
    /// Two components share at most one edge.
    NoDoubleAdjacency,
    /// No bounded face belongs to region 0.
    ExternalRegionConnected,
    /// At most one big component is internal.
    AtMostOneInternalBig,
    /// At most two small components; if exactly two, both are external, touch every
    /// other region, and have 4 edges (4 or 5 if they belong to different regions).
    SmallComponentsExternalWith4Edges,
}

impl Predicate {
    pub const ALL: [Predicate; 6] = [
        Predicate::MinEdges,
        Predicate::MaxEdges,
        Predicate::NoDoubleAdjacency,
        Predicate::ExternalRegionConnected,
        Predicate::AtMostOneInternalBig,
        Predicate::SmallComponentsExternalWith4Edges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::MinEdges => "min-edges",
            Predicate::MaxEdges => "max-edges",
            Predicate::NoDoubleAdjacency => "no-double-adjacency",
            Predicate::ExternalRegionConnected => "external-region-connected",
            Predicate::AtMostOneInternalBig => "at-most-one-internal-big",
            Predicate::SmallComponentsExternalWith4Edges => "small-components-external-with-4-edges",
        }
    }

    pub fn from_name(name: &str) -> Option<Predicate> {
        Predicate::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn holds(self, m: &LabeledMap) -> bool {
        let faces = 0..m.face_count();
        let big_m = m.bounded_count();
        match self {
            Predicate::MinEdges => m.region_count() <= 2 || faces.clone().all(|f| m.degree(f) >= 3),
            Predicate::MaxEdges => faces.clone().all(|f| {
                let k = m.components_of(m.label(f).region).len();
                let limit = if m.is_internal(f) { big_m.saturating_sub(k) } else { big_m + 1 - k };
                m.degree(f) <= limit
            }),
            Predicate::NoDoubleAdjacency => {
                faces.clone().all(|f| (0..m.face_count()).all(|g| f == g || m.shared_edges(f, g) <= 1))
            }
            Predicate::ExternalRegionConnected => m.components_of(EXTERNAL).len() == 1,
            Predicate::AtMostOneInternalBig => {
                faces.clone().filter(|&f| m.label(f).big && m.is_internal(f)).count() <= 1
            }
            Predicate::SmallComponentsExternalWith4Edges => {
                let small: Vec<usize> =
                    faces.clone().filter(|&f| m.label(f).region != EXTERNAL && !m.label(f).big).collect();
                if small.len() > 2 {
                    return false;
                }
                if small.len() < 2 {
                    return true;
                }
                let same_region = m.label(small[0]).region == m.label(small[1]).region;
                small.iter().all(|&f| {
                    let own = m.label(f).region;
                    let touches_all = (0..m.face_count())
                        .map(|g| m.label(g).region)
                        .filter(|&r| r != own)
                        .all(|r| m.components_of(r).iter().any(|&g| m.shared_edges(f, g) > 0));
                    let deg_ok = if same_region { m.degree(f) == 4 } else { matches!(m.degree(f), 4 | 5) };
                    !m.is_internal(f) && touches_all && deg_ok
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSet {
    active: Vec<Predicate>,
}

impl PredicateSet {
    pub fn new(active: Vec<Predicate>) -> Self {
        let mut active = active;
        active.sort();
        active.dedup();
        PredicateSet { active }
    }

    /// The structural filters: edge counts, single adjacency, connected E₀.
    pub fn base() -> Self {
        PredicateSet::new(Predicate::ALL[..4].to_vec())
    }

    /// Base filters plus the two big/small component filters.
    pub fn paper() -> Self {
        PredicateSet::new(Predicate::ALL.to_vec())
    }

    pub fn none() -> Self {
        PredicateSet::new(Vec::new())
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "base" => Some(Self::base()),
            "paper" => Some(Self::paper()),
            "none" => Some(Self::none()),
            _ => None,
        }
    }

    pub fn without(&self, p: Predicate) -> Self {
        PredicateSet::new(self.active.iter().copied().filter(|&q| q != p).collect())
    }

    pub fn active(&self) -> &[Predicate] {
        &self.active
    }

    /// First active predicate that fails, if any.
    pub fn first_failure(&self, m: &LabeledMap) -> Option<Predicate> {
        self.active.iter().copied().find(|p| !p.holds(m))
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub signature: TopologySignature,
    pub map: LabeledMap,
    pub excluded_by: Option<Predicate>,
}

#[derive(Debug, Serialize)]
struct EntryLine<'a> {
    signature: &'a str,
    regions: usize,
    components: usize,
    excluded_by: Option<&'static str>,
}

impl Entry {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&EntryLine {
            signature: self.signature.as_str(),
            regions: self.map.region_count(),
            components: self.map.bounded_count(),
            excluded_by: self.excluded_by.map(Predicate::name),
        })
        .expect("plain record serializes")
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Signatures passing every active predicate, sorted by signature.
    pub included: Vec<Entry>,
    /// Signatures removed by a predicate, with the first failing one.
    pub excluded: Vec<Entry>,
}

impl Enumeration {
    pub fn signatures(&self) -> Vec<TopologySignature> {
        self.included.iter().map(|e| e.signature.clone()).collect()
    }
}

/// Every rooted, loopless, connected trivalent map on `v` vertices rooted at
/// half-edge 0, each generated once in its own traversal labelling.
fn rooted_maps(v: usize, mut emit: impl FnMut(&[usize])) {
    fn rec(h: usize, v: usize, discovered: &mut usize, alpha: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        let mut h = h;
        while h < 3 * *discovered && alpha[h] != usize::MAX {
            h += 1;
        }
        if h == 3 * *discovered {
            if *discovered == v {
                emit(alpha);
            }
            return;
        }
        if *discovered < v {
            let k = 3 * *discovered;
            alpha[h] = k;
            alpha[k] = h;
            *discovered += 1;
            rec(h + 1, v, discovered, alpha, emit);
            *discovered -= 1;
            alpha[h] = usize::MAX;
            alpha[k] = usize::MAX;
        }
        for h2 in h + 1..3 * *discovered {
            if alpha[h2] == usize::MAX && h2 / 3 != h / 3 {
                alpha[h] = h2;
                alpha[h2] = h;
                rec(h + 1, v, discovered, alpha, emit);
                alpha[h] = usize::MAX;
                alpha[h2] = usize::MAX;
            }
        }
    }
    let mut alpha = vec![usize::MAX; 3 * v];
    let mut discovered = 1;
    rec(0, v, &mut discovered, &mut alpha, &mut emit);
}

/// Unlabelled loopless bridgeless planar trivalent maps with `m` bounded
/// faces, one per isomorphism class (reflections identified).
pub fn planar_cubic_maps(m: usize) -> Result<Vec<CombMap>, TopologyError> {
    let (v, _) = euler_counts(m)?;
    if m > MAX_COMPONENTS {
        return Err(TopologyError::OutOfScope { components: m });
    }
    let mut seen: BTreeMap<Vec<u32>, CombMap> = BTreeMap::new();
    rooted_maps(v, |alpha| {
        let map = CombMap { alpha: alpha.to_vec() };
        if !map.is_planar() || map.has_bridge() {
            return;
        }
        let (face_of, _) = map.faces();
        let code = canon_frames(&map, &face_of).code;
        seen.entry(code).or_insert(map);
    });
    Ok(seen.into_values().collect())
}

/// Face labellings of `map` with regions 1..=n (each used), region 0 on the
/// external face and possibly on other faces, adjacent faces in distinct
/// regions, and one designated big component per region.
fn labelings(map: &CombMap, n: usize, mut emit: impl FnMut(Vec<FaceLabel>, usize)) {
    let (face_of, count) = map.faces();
    let mut adjacent = vec![vec![false; count]; count];
    for h in 0..map.half_edges() {
        adjacent[face_of[h]][face_of[map.alpha(h)]] = true;
    }
    for external in 0..count {
        let mut region = vec![u32::MAX; count];
        region[external] = EXTERNAL;
        let others: Vec<usize> = (0..count).filter(|&f| f != external).collect();
        assign(0, &others, n as u32, &adjacent, &mut region, &mut |region| {
            let used: Vec<bool> = (0..=n as u32).map(|r| region.contains(&r)).collect();
            if !used[1..].iter().all(|&u| u) {
                return;
            }
            let groups: Vec<Vec<usize>> =
                (1..=n as u32).map(|r| (0..count).filter(|&f| region[f] == r).collect()).collect();
            let mut choice = vec![0usize; n];
            loop {
                let mut labels: Vec<FaceLabel> = region.iter().map(|&r| FaceLabel { region: r, big: false }).collect();
                for (g, &c) in groups.iter().zip(&choice) {
                    labels[g[c]].big = true;
                }
                emit(labels, external);
                // Advance the mixed-radix counter over big choices.
                let mut i = 0;
                while i < n {
                    choice[i] += 1;
                    if choice[i] < groups[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        });
    }
}

fn assign(
    i: usize,
    faces: &[usize],
    n: u32,
    adjacent: &[Vec<bool>],
    region: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    if i == faces.len() {
        emit(region);
        return;
    }
    let f = faces[i];
    for r in 0..=n {
        if (0..region.len()).any(|g| adjacent[f][g] && region[g] == r) {
            continue;
        }
        region[f] = r;
        assign(i + 1, faces, n, adjacent, region, emit);
        region[f] = u32::MAX;
    }
}

/// All labelled topologies with `n` regions and `m` bounded components,
/// split by the active predicates. Output is sorted by signature.
pub fn enumerate_topologies(n: usize, m: usize, preds: &PredicateSet) -> Result<Enumeration, TopologyError> {
    if m > MAX_COMPONENTS {
        return Err(TopologyError::OutOfScope { components: m });
    }
    if !(2 <= n && n <= m) {
        return Err(TopologyError::InvalidInput(format!("need 2 <= N <= M, got N={n}, M={m}")));
    }
    let maps = planar_cubic_maps(m)?;
    let partial: Vec<BTreeMap<TopologySignature, Entry>> = maps
        .par_iter()
        .map(|map| {
            let (face_of, _) = map.faces();
            let frames = canon_frames(map, &face_of);
            let mut out = BTreeMap::new();
            labelings(map, n, |labels, external| {
                let lm = LabeledMap::new(map.clone(), labels, external).expect("generated labels are valid");
                let sig = signature_from_frames(&frames, &lm.labels, external, n, m);
                out.entry(sig.clone()).or_insert_with(|| {
                    let excluded_by = preds.first_failure(&lm);
                    Entry { signature: sig, map: lm, excluded_by }
                });
            });
            out
        })
        .collect();
    let mut all: BTreeMap<TopologySignature, Entry> = BTreeMap::new();
    for part in partial {
        for (k, v) in part {
            all.entry(k).or_insert(v);
        }
    }
    let (included, excluded): (Vec<Entry>, Vec<Entry>) = all.into_values().partition(|e| e.excluded_by.is_none());
    Ok(Enumeration { included, excluded })
}

/// The labelled map of a cluster. A region with several components has its
/// largest-area face as the big one.
pub fn labeled_map_of(c: &Cluster) -> Result<LabeledMap, TopologyError> {
    let nv = c.vertices().len();
    let mut index: HashMap<Dart, usize> = HashMap::new();
    for v in 0..nv {
        for (i, d) in c.rotation(v).into_iter().enumerate() {
            index.insert(d, 3 * v + i);
        }
    }
    for (e, edge) in c.edges().iter().enumerate() {
        for forward in [true, false] {
            if !index.contains_key(&Dart { edge: e, forward }) {
                let vertex = if forward { edge.start } else { edge.end };
                return Err(TopologyError::NotTrivalent { vertex, degree: 0 });
            }
        }
    }
    let mut alpha = vec![0; 3 * nv];
    let mut cluster_face = vec![0; 3 * nv];
    for (d, &h) in &index {
        alpha[h] = index[&d.twin()];
    }
    for (fi, face) in c.faces().iter().enumerate() {
        for d in &face.darts {
            cluster_face[index[d]] = fi;
        }
    }
    let map = CombMap::new(alpha)?;
    let (face_of, count) = map.faces();
    let mut first = vec![usize::MAX; count];
    for h in (0..map.half_edges()).rev() {
        first[face_of[h]] = h;
    }
    let mut biggest: BTreeMap<RegionId, (f64, usize)> = BTreeMap::new();
    for f in 0..count {
        let cf = cluster_face[first[f]];
        let region = c.faces()[cf].region;
        if region != EXTERNAL {
            let area = c.face_area(cf);
            let slot = biggest.entry(region).or_insert((f64::NEG_INFINITY, f));
            if area > slot.0 {
                *slot = (area, f);
            }
        }
    }
    let labels: Vec<FaceLabel> = (0..count)
        .map(|f| {
            let region = c.faces()[cluster_face[first[f]]].region;
            FaceLabel { region, big: biggest.get(&region).is_some_and(|&(_, b)| b == f) }
        })
        .collect();
    let external = face_of[*index
        .iter()
        .find(|(d, _)| c.faces()[c.outer_face()].darts.contains(d))
        .map(|(_, h)| h)
        .ok_or_else(|| TopologyError::InvalidInput("cluster has no outer face".into()))?];
    LabeledMap::new(map, labels, external)
}

pub fn signature_of(c: &Cluster) -> Result<TopologySignature, TopologyError> {
    Ok(labeled_map_of(c)?.signature())
}

/// Isomorphism test by search over vertex bijections and per-vertex rotation
/// offsets (and the mirror image), independent of the canonical code.
pub fn brute_force_isomorphic(a: &LabeledMap, b: &LabeledMap) -> bool {
    if a.map.half_edges() != b.map.half_edges() || a.face_count() != b.face_count() {
        return false;
    }
    for mirror in [false, true] {
        let (bmap, bface): (CombMap, Vec<usize>) = if mirror {
            let mm = b.map.mirrored();
            let mut face = vec![0; b.face_of.len()];
            for h in 0..face.len() {
                face[CombMap::mirror_index(h)] = b.face_of[b.map.alpha(h)];
            }
            (mm, face)
        } else {
            (b.map.clone(), b.face_of.clone())
        };
        let v = a.map.vertex_count();
        let mut image = vec![usize::MAX; 3 * v];
        let mut used = vec![false; v];
        if search(0, a, &bmap, &bface, b, &mut image, &mut used) {
            return true;
        }
    }
    false
}

fn search(
    v: usize,
    a: &LabeledMap,
    bmap: &CombMap,
    bface: &[usize],
    b: &LabeledMap,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let nv = a.map.vertex_count();
    if v == nv {
        return labels_match(a, bface, b, image);
    }
    for w in 0..nv {
        if used[w] {
            continue;
        }
        for offset in 0..3 {
            for i in 0..3 {
                image[3 * v + i] = 3 * w + (i + offset) % 3;
            }
            let consistent = (0..3).all(|i| {
                let h = 3 * v + i;
                let partner = a.map.alpha(h);
                partner / 3 > v || bmap.alpha(image[h]) == image[partner]
            });
            if consistent {
                used[w] = true;
                if search(v + 1, a, bmap, bface, b, image, used) {
                    return true;
                }
                used[w] = false;
            }
        }
        for i in 0..3 {
            image[3 * v + i] = usize::MAX;
        }
    }
    false
}

fn labels_match(a: &LabeledMap, bface: &[usize], b: &LabeledMap, image: &[usize]) -> bool {
    let mut forward: HashMap<RegionId, RegionId> = HashMap::new();
    let mut backward: HashMap<RegionId, RegionId> = HashMap::new();
    for h in 0..image.len() {
        let fa = a.face_of[h];
        let fb = bface[image[h]];
        let (la, lb) = (a.labels[fa], b.labels[fb]);
        if la.big != lb.big || (fa == a.external) != (fb == b.external) {
            return false;
        }
        if (la.region == EXTERNAL) != (lb.region == EXTERNAL) {
            return false;
        }
        if *forward.entry(la.region).or_insert(lb.region) != lb.region
            || *backward.entry(lb.region).or_insert(la.region) != la.region
        {
            return false;
        }
    }
    true
}
