//! Linkages (families of vertex-disjoint paths between endpoint sets),
//! well-linkedness checking, and path systems.
//!
//! Disjoint paths are found by Menger-style unit-capacity max flow on the
//! vertex-split graph: every vertex v becomes v_in -> v_out with capacity
//! one, so vertex disjointness falls out of arc capacities. Ties are broken
//! by breadth-first search with neighbor lists in ascending order, which
//! makes the returned linkage deterministic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::walk::Path;

pub const DEFAULT_WELL_LINKED_BOUND: usize = 12;

/// Pairwise vertex-disjoint paths, each starting in `sources` and ending in
/// `sinks`. Single-vertex paths are allowed (a shared endpoint links to
/// itself by a zero-length path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linkage {
    paths: Vec<Path>,
    sources: BTreeSet<usize>,
    sinks: BTreeSet<usize>,
}

impl Linkage {
    pub fn new(paths: Vec<Path>, sources: BTreeSet<usize>, sinks: BTreeSet<usize>) -> Result<Linkage> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (i, p) in paths.iter().enumerate() {
            if !sources.contains(&p.first()) {
                return Err(Error::Internal(format!(
                    "linkage path {i} starts at {} outside the source set",
                    p.first()
                )));
            }
            if !sinks.contains(&p.last()) {
                return Err(Error::Internal(format!(
                    "linkage path {i} ends at {} outside the sink set",
                    p.last()
                )));
            }
            for &v in p.seq() {
                if !seen.insert(v) {
                    return Err(Error::Internal(format!(
                        "linkage paths are not vertex-disjoint at {v}"
                    )));
                }
            }
        }
        Ok(Linkage { paths, sources, sinks })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn sources(&self) -> &BTreeSet<usize> {
        &self.sources
    }

    pub fn sinks(&self) -> &BTreeSet<usize> {
        &self.sinks
    }

    /// Sub-linkage keeping `keep[i]`-indexed paths, same endpoint sets.
    pub fn restrict(&self, keep: &[usize]) -> Result<Linkage> {
        let paths = keep.iter().map(|&i| self.paths[i].clone()).collect();
        Linkage::new(paths, self.sources.clone(), self.sinks.clone())
    }
}

/// Unit-capacity flow network used for disjoint-path search.
struct FlowNet {
    // edges[i] = (to, residual capacity); edges come in twin pairs i, i^1.
    edges: Vec<(usize, u8)>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(nodes: usize) -> FlowNet {
        FlowNet { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        let id = self.edges.len();
        self.edges.push((to, 1));
        self.edges.push((from, 0));
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    /// One BFS augmentation from s to t; true if flow was pushed.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(s);
        'bfs: while let Some(u) = queue.pop_front() {
            for &eid in &self.adj[u] {
                let (to, cap) = self.edges[eid];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    pred[to] = Some(eid);
                    if to == t {
                        break 'bfs;
                    }
                    queue.push_back(to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let eid = pred[v].unwrap();
            self.edges[eid].1 -= 1;
            self.edges[eid ^ 1].1 += 1;
            v = self.edges[eid ^ 1].0;
        }
        true
    }
}

/// Finds |A| pairwise vertex-disjoint paths from A to B in G - removed, or
/// None if no such family exists. Vertices shared by A and B yield
/// zero-length single-vertex paths. Requires |A| = |B|.
pub fn find_disjoint_paths(
    g: &Digraph,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    removed: &BTreeSet<usize>,
) -> Result<Option<Linkage>> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    for &v in a.iter().chain(b.iter()) {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange(v, g.n()));
        }
        if removed.contains(&v) {
            return Err(Error::Internal(format!(
                "endpoint {v} is also in the removed set"
            )));
        }
    }
    if a.is_empty() {
        return Ok(Some(Linkage::new(Vec::new(), a.clone(), b.clone())?));
    }

    let n = g.n();
    let node_in = |v: usize| 2 * v;
    let node_out = |v: usize| 2 * v + 1;
    let s = 2 * n;
    let t = 2 * n + 1;
    let alive = |v: usize| !removed.contains(&v);

    let mut net = FlowNet::new(2 * n + 2);
    for v in 0..n {
        if alive(v) {
            net.add_edge(node_in(v), node_out(v));
        }
    }
    for (u, v) in g.arcs() {
        if alive(u) && alive(v) {
            net.add_edge(node_out(u), node_in(v));
        }
    }
    for &v in a {
        net.add_edge(s, node_in(v));
    }
    for &v in b {
        net.add_edge(node_out(v), t);
    }

    let mut flow = 0;
    while flow < a.len() && net.augment(s, t) {
        flow += 1;
    }
    if flow < a.len() {
        return Ok(None);
    }

    // Decompose: follow saturated edges from each source. Unit vertex
    // capacities mean the walk out of a source can never re-enter a cycle
    // or another path, so this is a plain pointer chase.
    let mut used = vec![false; net.edges.len()];
    let mut paths = Vec::with_capacity(a.len());
    for &start in a {
        let mut seq = vec![start];
        let mut node = node_out(start);
        loop {
            let mut next = None;
            for &eid in &net.adj[node] {
                // Forward edges are the even ids; saturated means residual 0.
                if eid % 2 == 0 && net.edges[eid].1 == 0 && !used[eid] {
                    next = Some(eid);
                    break;
                }
            }
            let eid = next.ok_or_else(|| {
                Error::Internal("flow decomposition lost its trail".into())
            })?;
            used[eid] = true;
            let to = net.edges[eid].0;
            if to == t {
                break;
            }
            // to is some v_in; hop through the split edge to v_out.
            let v = to / 2;
            seq.push(v);
            node = node_out(v);
            // Mark the split edge used as well.
            for &sid in &net.adj[to] {
                if sid % 2 == 0 && net.edges[sid].0 == node && net.edges[sid].1 == 0 {
                    used[sid] = true;
                    break;
                }
            }
        }
        paths.push(Path::new(g, seq)?);
    }
    Ok(Some(Linkage::new(paths, a.clone(), b.clone())?))
}

/// Finds a violating pair (A, B) witnessing that X is not well-linked, or
/// None if every equal-size disjoint subset pair links up. Exhaustive in
/// 3^|X| subset pairs; refuses sets larger than `bound`.
pub fn well_linked_witness(
    g: &Digraph,
    x: &BTreeSet<usize>,
    bound: usize,
) -> Result<Option<(BTreeSet<usize>, BTreeSet<usize>)>> {
    if x.len() > bound {
        return Err(Error::TooLargeForExhaustive(x.len(), bound));
    }
    let xs: Vec<usize> = x.iter().copied().collect();
    let k = xs.len();
    // Each element gets a ternary digit: 0 = neither, 1 = A, 2 = B.
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut a = BTreeSet::new();
        let mut b = BTreeSet::new();
        let mut c = code;
        for &v in &xs {
            match c % 3 {
                1 => {
                    a.insert(v);
                }
                2 => {
                    b.insert(v);
                }
                _ => {}
            }
            c /= 3;
        }
        if a.is_empty() || a.len() != b.len() {
            continue;
        }
        let ab: BTreeSet<usize> = a.union(&b).copied().collect();
        let removed: BTreeSet<usize> = x.difference(&ab).copied().collect();
        if find_disjoint_paths(g, &a, &b, &removed)?.is_none() {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

pub fn is_well_linked_with_bound(g: &Digraph, x: &BTreeSet<usize>, bound: usize) -> Result<bool> {
    Ok(well_linked_witness(g, x, bound)?.is_none())
}

pub fn is_well_linked(g: &Digraph, x: &BTreeSet<usize>) -> Result<bool> {
    is_well_linked_with_bound(g, x, DEFAULT_WELL_LINKED_BOUND)
}

/// Vertex-disjoint paths P_1..P_a with marked sets A_i, B_i on each path,
/// every B_i vertex strictly later on P_i than every A_i vertex, and the
/// union of all marked sets well-linked. The constructor checks shape only;
/// semantic conditions are reported by [`validate_path_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    paths: Vec<Path>,
    a_sets: Vec<BTreeSet<usize>>,
    b_sets: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsViolation {
    /// |A_i| or |B_i| differs from the common set size.
    SetSize { path: usize, which: SetKind, got: usize, want: usize },
    /// A marked vertex does not lie on its path.
    Membership { path: usize, which: SetKind, vertex: usize },
    /// A_i and B_i share a vertex.
    SharedEndpoint { path: usize, vertex: usize },
    /// Some A_i vertex does not precede every B_i vertex on P_i.
    OrderViolation(usize),
    /// Two system paths share a vertex.
    DisjointnessViolation(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WellLinkedStatus {
    Verified,
    AssertedByConstruction,
    TooLargeForExhaustive(usize),
    Violated(BTreeSet<usize>, BTreeSet<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystemReport {
    pub violations: Vec<PsViolation>,
    pub well_linked: WellLinkedStatus,
}

impl PathSystemReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
            && !matches!(self.well_linked, WellLinkedStatus::Violated(..))
    }
}

#[derive(Serialize, Deserialize)]
struct PsJson {
    paths: Vec<Vec<usize>>,
    #[serde(rename = "A")]
    a: Vec<Vec<usize>>,
    #[serde(rename = "B")]
    b: Vec<Vec<usize>>,
}

impl PathSystem {
    pub fn new(
        g: &Digraph,
        paths: Vec<Vec<usize>>,
        a_sets: Vec<BTreeSet<usize>>,
        b_sets: Vec<BTreeSet<usize>>,
    ) -> Result<PathSystem> {
        if paths.len() != a_sets.len() || paths.len() != b_sets.len() {
            return Err(Error::Internal(format!(
                "path/set count mismatch: {} paths, {} A sets, {} B sets",
                paths.len(),
                a_sets.len(),
                b_sets.len()
            )));
        }
        if paths.is_empty() {
            return Err(Error::Internal("a path system needs at least one path".into()));
        }
        let paths = paths
            .into_iter()
            .map(|seq| Path::new(g, seq))
            .collect::<Result<Vec<_>>>()?;
        Ok(PathSystem { paths, a_sets, b_sets })
    }

    pub fn a_count(&self) -> usize {
        self.paths.len()
    }

    /// The common marked-set size b (taken from A_1).
    pub fn set_size(&self) -> usize {
        self.a_sets[0].len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn a_set(&self, i: usize) -> &BTreeSet<usize> {
        &self.a_sets[i]
    }

    pub fn b_set(&self, i: usize) -> &BTreeSet<usize> {
        &self.b_sets[i]
    }

    pub fn marked_union(&self) -> BTreeSet<usize> {
        let mut u = BTreeSet::new();
        for s in self.a_sets.iter().chain(self.b_sets.iter()) {
            u.extend(s.iter().copied());
        }
        u
    }

    pub fn to_json(&self) -> String {
        let js = PsJson {
            paths: self.paths.iter().map(|p| p.seq().to_vec()).collect(),
            a: self.a_sets.iter().map(|s| s.iter().copied().collect()).collect(),
            b: self.b_sets.iter().map(|s| s.iter().copied().collect()).collect(),
        };
        serde_json::to_string_pretty(&js).expect("plain data serializes")
    }

    /// Parses the JSON schema and validates in non-exhaustive mode; shape
    /// errors fail, semantic findings come back in the report.
    pub fn from_json(g: &Digraph, text: &str) -> Result<(PathSystem, PathSystemReport)> {
        let js: PsJson = serde_json::from_str(text)?;
        let ps = PathSystem::new(
            g,
            js.paths,
            js.a.into_iter().map(|v| v.into_iter().collect()).collect(),
            js.b.into_iter().map(|v| v.into_iter().collect()).collect(),
        )?;
        let report = validate_path_system(g, &ps, false, DEFAULT_WELL_LINKED_BOUND);
        Ok((ps, report))
    }
}

/// Checks every path-system condition and reports all findings. With
/// `exhaustive` the union of marked sets is brute-force well-linkedness
/// checked (up to `wl_bound` vertices); otherwise the claim is recorded as
/// asserted by construction.
pub fn validate_path_system(
    g: &Digraph,
    ps: &PathSystem,
    exhaustive: bool,
    wl_bound: usize,
) -> PathSystemReport {
    let mut violations = Vec::new();
    let want = ps.set_size();
    for i in 0..ps.a_count() {
        let p = &ps.paths[i];
        for (which, set) in [(SetKind::A, ps.a_set(i)), (SetKind::B, ps.b_set(i))] {
            if set.len() != want {
                violations.push(PsViolation::SetSize { path: i, which, got: set.len(), want });
            }
            for &v in set {
                if !p.contains_vertex(v) {
                    violations.push(PsViolation::Membership { path: i, which, vertex: v });
                }
            }
        }
        for &v in ps.a_set(i).intersection(ps.b_set(i)) {
            violations.push(PsViolation::SharedEndpoint { path: i, vertex: v });
        }
        // Order: the latest A position must precede the earliest B position.
        let a_max = ps.a_set(i).iter().filter_map(|&v| p.position_of(v)).max();
        let b_min = ps.b_set(i).iter().filter_map(|&v| p.position_of(v)).min();
        if let (Some(am), Some(bm)) = (a_max, b_min) {
            if am >= bm {
                violations.push(PsViolation::OrderViolation(i));
            }
        }
    }
    for i in 0..ps.a_count() {
        for j in (i + 1)..ps.a_count() {
            if ps.paths[i].vertex_set().intersection(&ps.paths[j].vertex_set()).next().is_some() {
                violations.push(PsViolation::DisjointnessViolation(i, j));
            }
        }
    }
    let well_linked = if !exhaustive {
        WellLinkedStatus::AssertedByConstruction
    } else {
        let union = ps.marked_union();
        match well_linked_witness(g, &union, wl_bound) {
            Ok(None) => WellLinkedStatus::Verified,
            Ok(Some((a, b))) => WellLinkedStatus::Violated(a, b),
            Err(Error::TooLargeForExhaustive(size, _)) => {
                WellLinkedStatus::TooLargeForExhaustive(size)
            }
            Err(e) => {
                violations.push(PsViolation::Membership {
                    path: usize::MAX,
                    which: SetKind::A,
                    vertex: usize::MAX,
                });
                debug_assert!(false, "well-linkedness check failed unexpectedly: {e}");
                WellLinkedStatus::AssertedByConstruction
            }
        }
    };
    PathSystemReport { violations, well_linked }
}
