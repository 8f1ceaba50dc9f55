//! Bramble assembly. A bramble here is a family of strongly connected
//! vertex sets that pairwise touch (shared vertex, or arcs both ways), and
//! every constructor in this module hands back one together with enough
//! witnesses that it can be re-checked from scratch.
//!
//! Two construction routes are provided. The dense route contracts a clique
//! minor out of the intersection graph of a closed-walk family. The sparse
//! route starts from a path system plus a low-congestion family of
//! connector paths between the system paths, and glues closed walks along
//! the trees of a clique minor in the pair graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    find_clique_minor, independent_transversal, intersection_graph,
    intersection_graph_bipartite, is_degenerate, UGraph, DEFAULT_TRANSVERSAL_BUDGET,
};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linkage::{Linkage, PathSystem};
use crate::walk::{congestion_of_sets, Path, Walk, WalkFamily};

const MINOR_RESTARTS: usize = 64;

/// Touching witness for one pair of bramble elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TouchCert {
    SharedVertex(usize),
    /// Arcs (u, v) and (x, y) with u, y in the lower-indexed element and
    /// v, x in the other one.
    ArcPair((usize, usize), (usize, usize)),
}

/// Verified bramble: elements with closed spanning walks as connectivity
/// certificates and a touching certificate per pair. The constructor
/// recomputes everything, so a value of this type is the check.
#[derive(Debug, Clone)]
pub struct Bramble {
    elements: Vec<BTreeSet<usize>>,
    witnesses: Vec<Walk>,
    touches: BTreeMap<(usize, usize), TouchCert>,
    congestion: usize,
}

#[derive(Serialize, Deserialize)]
struct BrambleJson {
    elements: Vec<Vec<usize>>,
    size: usize,
    congestion: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Vec<usize>>>,
}

impl Bramble {
    /// Validates elements against their witness walks and derives all
    /// touching certificates. A single-vertex element carries the trivial
    /// one-vertex walk; everything larger needs a closed walk visiting
    /// exactly the element.
    pub fn new(g: &Digraph, elements: Vec<BTreeSet<usize>>, witnesses: Vec<Walk>) -> Result<Bramble> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        if elements.len() != witnesses.len() {
            return Err(Error::SizeMismatch(witnesses.len(), elements.len()));
        }
        for (k, (el, w)) in elements.iter().zip(&witnesses).enumerate() {
            if el.is_empty() {
                return Err(Error::EmptySet);
            }
            if let Some(&v) = el.iter().next_back() {
                if v >= g.n() {
                    return Err(Error::VertexOutOfRange(v, g.n()));
                }
            }
            if w.vertex_set() != *el {
                return Err(Error::Internal(format!(
                    "witness walk {k} does not visit exactly its element"
                )));
            }
            if el.len() > 1 && !w.is_closed() {
                return Err(Error::NotClosed);
            }
        }
        let mut touches = BTreeMap::new();
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                let cert = touch_certificate(g, &elements[i], &elements[j]).ok_or_else(|| {
                    Error::Internal(format!("elements {i} and {j} do not touch"))
                })?;
                touches.insert((i, j), cert);
            }
        }
        let congestion = congestion_of_sets(&elements);
        Ok(Bramble { elements, witnesses, touches, congestion })
    }

    pub fn elements(&self) -> &[BTreeSet<usize>] {
        &self.elements
    }

    pub fn witnesses(&self) -> &[Walk] {
        &self.witnesses
    }

    pub fn touches(&self) -> &BTreeMap<(usize, usize), TouchCert> {
        &self.touches
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Largest number of elements any single vertex belongs to.
    pub fn congestion(&self) -> usize {
        self.congestion
    }

    pub fn to_json(&self) -> String {
        let js = BrambleJson {
            elements: self.elements.iter().map(|s| s.iter().copied().collect()).collect(),
            size: self.size(),
            congestion: self.congestion,
            witnesses: Some(self.witnesses.iter().map(|w| w.seq().to_vec()).collect()),
        };
        serde_json::to_string_pretty(&js).expect("plain data serializes")
    }

    /// Parses and re-validates. Without a witness block the spanning walks
    /// are rebuilt, so elements must actually be strongly connected.
    pub fn from_json(g: &Digraph, text: &str) -> Result<Bramble> {
        let js: BrambleJson = serde_json::from_str(text)?;
        let elements: Vec<BTreeSet<usize>> =
            js.elements.into_iter().map(|v| v.into_iter().collect()).collect();
        let witnesses = match js.witnesses {
            Some(ws) => ws
                .into_iter()
                .map(|s| if s.len() == 1 { Walk::open(g, s) } else { Walk::closed(g, s) })
                .collect::<Result<Vec<_>>>()?,
            None => elements
                .iter()
                .map(|el| closed_spanning_walk(g, el))
                .collect::<Result<Vec<_>>>()?,
        };
        let b = Bramble::new(g, elements, witnesses)?;
        if b.size() != js.size || b.congestion() != js.congestion {
            return Err(Error::Json(format!(
                "declared size {} / congestion {} disagree with the elements",
                js.size, js.congestion
            )));
        }
        Ok(b)
    }
}

fn touch_certificate(g: &Digraph, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> Option<TouchCert> {
    if let Some(&v) = x.intersection(y).next() {
        return Some(TouchCert::SharedVertex(v));
    }
    let fwd = x
        .iter()
        .flat_map(|&u| y.iter().map(move |&v| (u, v)))
        .find(|&(u, v)| g.has_arc(u, v))?;
    let back = y
        .iter()
        .flat_map(|&u| x.iter().map(move |&v| (u, v)))
        .find(|&(u, v)| g.has_arc(u, v))?;
    Some(TouchCert::ArcPair(fwd, back))
}

fn bfs_path_within(
    g: &Digraph,
    allowed: &BTreeSet<usize>,
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    if from == to {
        return Some(vec![from]);
    }
    let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    'bfs: while let Some(u) = queue.pop_front() {
        for &w in g.out_neighbors(u) {
            if w != from && allowed.contains(&w) && !pred.contains_key(&w) {
                pred.insert(w, u);
                if w == to {
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
    }
    let mut seq = vec![to];
    let mut cur = to;
    while cur != from {
        cur = *pred.get(&cur)?;
        seq.push(cur);
    }
    seq.reverse();
    Some(seq)
}

/// Closed walk visiting exactly `set`: a tour through the members in id
/// order, each hop a shortest path inside the set.
fn closed_spanning_walk(g: &Digraph, set: &BTreeSet<usize>) -> Result<Walk> {
    let Some(&first) = set.iter().next() else {
        return Err(Error::EmptySet);
    };
    if set.len() == 1 {
        return Walk::open(g, vec![first]);
    }
    if !g.is_strongly_connected(set)? {
        return Err(Error::HypothesisUnmet("element is not strongly connected".into()));
    }
    let mut seq = vec![first];
    let stops: Vec<usize> = set.iter().copied().skip(1).chain([first]).collect();
    for target in stops {
        let cur = *seq.last().unwrap();
        if cur == target {
            continue;
        }
        let hop = bfs_path_within(g, set, cur, target)
            .ok_or_else(|| Error::Internal("strongly connected set lost a path".into()))?;
        seq.extend_from_slice(&hop[1..]);
    }
    Walk::closed(g, seq)
}

/// Splices closed walks that hang together through shared vertices into one
/// closed walk: rotate the next walk to start at a shared vertex and insert
/// it at an occurrence of that vertex.
fn merge_closed_walks(g: &Digraph, walks: &[Walk]) -> Result<Walk> {
    if walks.is_empty() {
        return Err(Error::EmptySet);
    }
    for w in walks {
        if !w.is_closed() {
            return Err(Error::NotClosed);
        }
    }
    let mut seq: Vec<usize> = walks[0].seq().to_vec();
    let mut left: Vec<usize> = (1..walks.len()).collect();
    while !left.is_empty() {
        let have: BTreeSet<usize> = seq.iter().copied().collect();
        let slot = left
            .iter()
            .position(|&i| walks[i].seq().iter().any(|v| have.contains(v)))
            .ok_or_else(|| Error::Internal("walks split into disconnected groups".into()))?;
        let w = walks[left.remove(slot)].seq();
        let core = &w[..w.len() - 1];
        let p = core.iter().position(|v| have.contains(v)).unwrap();
        let v = core[p];
        let at = seq.iter().position(|&u| u == v).unwrap();
        let mut rotated: Vec<usize> = core[p..].iter().chain(core[..p].iter()).copied().collect();
        rotated.push(v);
        seq.splice(at + 1..at + 1, rotated.into_iter().skip(1));
    }
    Walk::closed(g, seq)
}

/// Bramble from a closed-walk family whose intersection graph is dense.
/// The graph must not be `threshold`-degenerate; branch sets of a K_d minor
/// become the elements. Returns Ok(None) when no such minor was found, and
/// never exceeds the walk family's own congestion.
pub fn dense_scenario(
    g: &Digraph,
    fam: &WalkFamily,
    d: usize,
    threshold: usize,
    seed: u64,
) -> Result<Option<Bramble>> {
    if d == 0 {
        return Err(Error::Internal("asked for a bramble with zero elements".into()));
    }
    if fam.is_empty() {
        return Err(Error::PreconditionUnmet("empty walk family".into()));
    }
    let sets: Vec<BTreeSet<usize>> = fam.walks().iter().map(|w| w.vertex_set()).collect();
    let ig = intersection_graph(&sets);
    if is_degenerate(&ig, threshold) {
        return Err(Error::PreconditionUnmet(format!(
            "walk intersection graph is {threshold}-degenerate"
        )));
    }
    let Some(branch) = find_clique_minor(&ig, d, seed, MINOR_RESTARTS) else {
        return Ok(None);
    };
    let mut elements = Vec::with_capacity(branch.len());
    let mut witnesses = Vec::with_capacity(branch.len());
    for part in &branch {
        let group: Vec<Walk> = part.iter().map(|&i| fam.walks()[i].clone()).collect();
        witnesses.push(merge_closed_walks(g, &group)?);
        let mut el = BTreeSet::new();
        for &i in part {
            el.extend(sets[i].iter().copied());
        }
        elements.push(el);
    }
    let b = Bramble::new(g, elements, witnesses)?;
    if b.congestion() > fam.congestion() {
        return Err(Error::Internal(format!(
            "bramble congestion {} exceeds the walk family's {}",
            b.congestion(),
            fam.congestion()
        )));
    }
    Ok(Some(b))
}

/// Last arc of system path `i` whose tail is one of the path's A-side
/// marked vertices.
fn last_marked_tail_arc(ps: &PathSystem, i: usize) -> Result<(usize, usize)> {
    let p = &ps.paths()[i];
    let seq = p.seq();
    let t = (0..seq.len().saturating_sub(1))
        .rev()
        .find(|&t| ps.a_set(i).contains(&seq[t]))
        .ok_or_else(|| {
            Error::Internal(format!("path {i} has no arc leaving its A-side marks"))
        })?;
    Ok((seq[t], seq[t + 1]))
}

fn walk_has_arc(w: &Walk, arc: (usize, usize)) -> bool {
    w.seq().windows(2).any(|s| (s[0], s[1]) == arc)
}

/// Closed walk for the host pair {i, j}: forward connector, a stretch of
/// path j, the reverse connector, and a stretch of path i back to the
/// start. Both stretches run A-side to B-side, which the path-system
/// ordering guarantees.
fn closed_pair_walk(
    g: &Digraph,
    ps: &PathSystem,
    i: usize,
    j: usize,
    pij: &Path,
    pji: &Path,
) -> Result<Walk> {
    let stretch = |host: usize, from_v: usize, to_v: usize| -> Result<Vec<usize>> {
        let hp = &ps.paths()[host];
        let from = hp.position_of(from_v).ok_or_else(|| {
            Error::Internal(format!("connector endpoint {from_v} is off path {host}"))
        })?;
        let to = hp.position_of(to_v).ok_or_else(|| {
            Error::Internal(format!("connector endpoint {to_v} is off path {host}"))
        })?;
        if from >= to {
            return Err(Error::Internal(format!(
                "connector endpoints run against the order of path {host}"
            )));
        }
        Ok(hp.seq()[from + 1..=to].to_vec())
    };
    let mut seq = pij.seq().to_vec();
    seq.extend(stretch(j, pij.last(), pji.first())?);
    seq.extend_from_slice(&pji.seq()[1..]);
    seq.extend(stretch(i, pji.last(), pij.first())?);
    let w = Walk::closed(g, seq)?;
    for host in [i, j] {
        if !walk_has_arc(&w, last_marked_tail_arc(ps, host)?) {
            return Err(Error::Internal(format!(
                "pair walk for {{{i},{j}}} misses the designated arc of path {host}"
            )));
        }
    }
    Ok(w)
}

fn largest_clique_minor(h: &UGraph, seed: u64) -> (usize, Vec<BTreeSet<usize>>) {
    for t in (1..=h.n()).rev() {
        if let Some(bd) = find_clique_minor(h, t, seed, MINOR_RESTARTS) {
            return (t, bd);
        }
    }
    unreachable!("a nonempty graph always has a single-vertex minor")
}

/// BFS spanning tree edges of h restricted to `verts`, rooted at the
/// smallest member.
fn bfs_tree_edges(h: &UGraph, verts: &BTreeSet<usize>) -> Result<Vec<(usize, usize)>> {
    let root = *verts.iter().next().expect("tree over an empty set");
    let mut seen: BTreeSet<usize> = [root].into_iter().collect();
    let mut queue = std::collections::VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        let mut nb: Vec<usize> = h
            .neighbors(u)
            .iter()
            .copied()
            .filter(|w| verts.contains(w) && !seen.contains(w))
            .collect();
        nb.sort_unstable();
        for w in nb {
            if seen.insert(w) {
                edges.push((u.min(w), u.max(w)));
                queue.push_back(w);
            }
        }
    }
    if seen.len() != verts.len() {
        return Err(Error::Internal(
            "branch-set union is disconnected in the pair graph".into(),
        ));
    }
    Ok(edges)
}

/// Bramble from a path system and one connector path per ordered pair in
/// `pairs`. Connectors run from the B side of their first path to the A
/// side of their second and may overlap up to congestion `alpha`. At least
/// six tenths of all ordered pairs must be present. The result has one
/// element per leg of a clique minor in the symmetric-pair graph and
/// congestion at most 2 + 2*alpha.
pub fn sparse_scenario(
    g: &Digraph,
    ps: &PathSystem,
    pairs: &BTreeSet<(usize, usize)>,
    connectors: &BTreeMap<(usize, usize), Path>,
    alpha: usize,
    seed: u64,
) -> Result<Bramble> {
    let a = ps.a_count();
    for &(i, j) in pairs {
        if i >= a || j >= a {
            return Err(Error::VertexOutOfRange(i.max(j), a));
        }
        if i == j {
            return Err(Error::Internal(format!("pair ({i},{i}) relates a path to itself")));
        }
    }
    if connectors.len() != pairs.len() || !pairs.iter().all(|p| connectors.contains_key(p)) {
        return Err(Error::SizeMismatch(connectors.len(), pairs.len()));
    }
    if 10 * pairs.len() < 6 * a * a.saturating_sub(1) {
        return Err(Error::HypothesisUnmet(format!(
            "only {} of {} ordered pairs are connected, below the six-tenths fraction",
            pairs.len(),
            a * a.saturating_sub(1)
        )));
    }
    for (&(i, j), p) in connectors {
        if !ps.b_set(i).contains(&p.first()) || !ps.a_set(j).contains(&p.last()) {
            return Err(Error::HypothesisUnmet(format!(
                "connector for ({i},{j}) does not run from the B side of path {i} to the A side of path {j}"
            )));
        }
    }
    let conn_sets: Vec<BTreeSet<usize>> = connectors.values().map(|p| p.vertex_set()).collect();
    let conn_congestion = congestion_of_sets(&conn_sets);
    if conn_congestion > alpha {
        return Err(Error::HypothesisUnmet(format!(
            "connector congestion is {conn_congestion}, above the promised {alpha}"
        )));
    }

    // Pair graph: an edge wherever both directions are connected.
    let mut h = UGraph::new(a);
    for &(i, j) in pairs {
        if i < j && pairs.contains(&(j, i)) {
            h.add_edge(i, j)?;
        }
    }
    let (p_size, branch) = largest_clique_minor(&h, seed);
    let mut q = 1;
    while (q + 1) * q / 2 <= p_size {
        q += 1;
    }
    if q < 2 {
        return Err(Error::DegenerateOutcome(q));
    }

    // One branch set per unordered label pair, surplus dropped from the top.
    let kept = &branch[..q * (q - 1) / 2];
    let mut owner: BTreeMap<(usize, usize), &BTreeSet<usize>> = BTreeMap::new();
    let mut idx = 0;
    for x in 0..q {
        for y in (x + 1)..q {
            owner.insert((x, y), &kept[idx]);
            idx += 1;
        }
    }

    let mut trees: Vec<Vec<(usize, usize)>> = Vec::with_capacity(q);
    let mut tree_verts: Vec<BTreeSet<usize>> = Vec::with_capacity(q);
    for x in 0..q {
        let mut u = BTreeSet::new();
        for y in 0..q {
            if y != x {
                let key = (x.min(y), x.max(y));
                u.extend(owner[&key].iter().copied());
            }
        }
        let edges = bfs_tree_edges(&h, &u)?;
        if edges.is_empty() {
            return Err(Error::DegenerateOutcome(q));
        }
        trees.push(edges);
        tree_verts.push(u);
    }

    // Disjoint branch sets put every host in at most two of the unions, and
    // with it every tree edge in at most two trees. Both are re-counted.
    for i in 0..a {
        let c = tree_verts.iter().filter(|s| s.contains(&i)).count();
        if c > 2 {
            return Err(Error::Internal(format!("host {i} landed in {c} trees")));
        }
    }
    let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &trees {
        for &e in t {
            *edge_use.entry(e).or_insert(0) += 1;
        }
    }
    if let Some((&e, &c)) = edge_use.iter().find(|&(_, &c)| c > 2) {
        return Err(Error::Internal(format!("tree edge {e:?} used {c} times")));
    }

    let mut pair_walks: BTreeMap<(usize, usize), Walk> = BTreeMap::new();
    for e in edge_use.keys() {
        let (i, j) = *e;
        let w = closed_pair_walk(g, ps, i, j, &connectors[&(i, j)], &connectors[&(j, i)])?;
        pair_walks.insert(*e, w);
    }

    let mut elements = Vec::with_capacity(q);
    let mut witnesses = Vec::with_capacity(q);
    for t in &trees {
        let group: Vec<Walk> = t.iter().map(|e| pair_walks[e].clone()).collect();
        let w = merge_closed_walks(g, &group)?;
        elements.push(w.vertex_set());
        witnesses.push(w);
    }
    let b = Bramble::new(g, elements, witnesses)?;
    if b.size() != q {
        return Err(Error::Internal(format!("expected {q} elements, built {}", b.size())));
    }
    let cap = 2 + 2 * alpha;
    if b.congestion() > cap {
        return Err(Error::Internal(format!(
            "bramble congestion {} exceeds 2 + 2*alpha = {cap}",
            b.congestion()
        )));
    }
    Ok(b)
}

/// Sparse route when each pair offers a whole linkage instead of a single
/// connector. Any two linkages must cross so little that their bipartite
/// intersection graph stays `d`-degenerate; a resampled independent
/// transversal then picks pairwise disjoint connectors and the single-path
/// route takes over with alpha = 1, so the result has congestion at most 4.
/// The caller is responsible for linkages large enough that the transversal
/// is guaranteed to exist; absence is reported, never papered over.
pub fn sparse_wrapped(
    g: &Digraph,
    ps: &PathSystem,
    pairs: &BTreeSet<(usize, usize)>,
    linkages: &BTreeMap<(usize, usize), Linkage>,
    d: usize,
    seed: u64,
) -> Result<Bramble> {
    if linkages.len() != pairs.len() || !pairs.iter().all(|p| linkages.contains_key(p)) {
        return Err(Error::SizeMismatch(linkages.len(), pairs.len()));
    }
    for (&(i, j), lk) in linkages {
        if lk.is_empty() {
            return Err(Error::EmptySet);
        }
        for p in lk.paths() {
            if !ps.b_set(i).contains(&p.first()) || !ps.a_set(j).contains(&p.last()) {
                return Err(Error::HypothesisUnmet(format!(
                    "linkage for ({i},{j}) does not run from the B side of path {i} to the A side of path {j}"
                )));
            }
        }
    }

    let keys: Vec<(usize, usize)> = pairs.iter().copied().collect();
    let path_sets: Vec<Vec<BTreeSet<usize>>> = keys
        .iter()
        .map(|k| linkages[k].paths().iter().map(|p| p.vertex_set()).collect())
        .collect();
    for x in 0..keys.len() {
        for y in (x + 1)..keys.len() {
            let ig = intersection_graph_bipartite(&path_sets[x], &path_sets[y]);
            if !is_degenerate(&ig, d) {
                return Err(Error::PreconditionUnmet(format!(
                    "linkages for {:?} and {:?} cross above degeneracy {d}",
                    keys[x], keys[y]
                )));
            }
        }
    }

    // Conflict graph over all linkage paths; edges only across pairs.
    let mut flat: Vec<&BTreeSet<usize>> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of: Vec<usize> = Vec::new();
    for (ci, sets) in path_sets.iter().enumerate() {
        let mut class = Vec::new();
        for s in sets {
            class.push(flat.len());
            class_of.push(ci);
            flat.push(s);
        }
        classes.push(class);
    }
    let mut cg = UGraph::new(flat.len());
    for u in 0..flat.len() {
        for v in (u + 1)..flat.len() {
            if class_of[u] != class_of[v] && flat[u].intersection(flat[v]).next().is_some() {
                cg.add_edge(u, v)?;
            }
        }
    }
    let picks = independent_transversal(&cg, &classes, seed, DEFAULT_TRANSVERSAL_BUDGET)?
        .ok_or(Error::TransversalAbsent)?;

    let mut connectors: BTreeMap<(usize, usize), Path> = BTreeMap::new();
    for (ci, &pick) in picks.iter().enumerate() {
        let local = classes[ci].iter().position(|&s| s == pick).ok_or_else(|| {
            Error::Internal("transversal returned a vertex outside its class".into())
        })?;
        connectors.insert(keys[ci], linkages[&keys[ci]].paths()[local].clone());
    }
    let chosen_sets: Vec<BTreeSet<usize>> = connectors.values().map(|p| p.vertex_set()).collect();
    if congestion_of_sets(&chosen_sets) > 1 {
        return Err(Error::Internal("transversal connectors are not disjoint".into()));
    }

    let b = sparse_scenario(g, ps, pairs, &connectors, 1, seed)?;
    if b.congestion() > 4 {
        return Err(Error::Internal(format!(
            "wrapped sparse congestion {} exceeds 4",
            b.congestion()
        )));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hub(leaves: usize) -> (Digraph, WalkFamily) {
        let mut g = Digraph::new(leaves + 1);
        for i in 1..=leaves {
            g.add_arc(0, i).unwrap();
            g.add_arc(i, 0).unwrap();
        }
        let walks = (1..=leaves).map(|i| Walk::closed(&g, vec![0, i, 0]).unwrap()).collect();
        (g, WalkFamily::new(walks))
    }

    /// `a` host paths (A side then B side, one slot per other host) plus a
    /// private three-vertex connector for each requested ordered pair.
    fn lane_instance(
        a: usize,
        pairs: &[(usize, usize)],
    ) -> (Digraph, PathSystem, BTreeMap<(usize, usize), Path>) {
        let b = a - 1;
        let hl = 2 * b;
        let mut g = Digraph::new(a * hl + pairs.len());
        for i in 0..a {
            for t in 0..hl - 1 {
                g.add_arc(i * hl + t, i * hl + t + 1).unwrap();
            }
        }
        let mut raw = BTreeMap::new();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let mid = a * hl + k;
            let start = i * hl + b + (j - usize::from(j > i));
            let end = j * hl + (i - usize::from(i > j));
            g.add_arc(start, mid).unwrap();
            g.add_arc(mid, end).unwrap();
            raw.insert((i, j), vec![start, mid, end]);
        }
        let paths: Vec<Vec<usize>> = (0..a).map(|i| (i * hl..(i + 1) * hl).collect()).collect();
        let a_sets = (0..a).map(|i| (i * hl..i * hl + b).collect()).collect();
        let b_sets = (0..a).map(|i| (i * hl + b..(i + 1) * hl).collect()).collect();
        let ps = PathSystem::new(&g, paths, a_sets, b_sets).unwrap();
        let connectors =
            raw.into_iter().map(|(k, seq)| (k, Path::new(&g, seq).unwrap())).collect();
        (g, ps, connectors)
    }

    fn all_ordered_pairs(a: usize) -> Vec<(usize, usize)> {
        (0..a).flat_map(|i| (0..a).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    #[test]
    fn hub_walks_collapse_to_a_clique_bramble() {
        let (g, fam) = hub(6);
        let b = dense_scenario(&g, &fam, 4, 2, 7).unwrap().unwrap();
        assert_eq!(b.size(), 4);
        assert!(b.congestion() <= fam.congestion());
        for el in b.elements() {
            assert!(el.contains(&0));
        }
    }

    #[test]
    fn degenerate_intersection_graph_is_rejected_up_front() {
        let (g, fam) = hub(6);
        assert!(matches!(
            dense_scenario(&g, &fam, 2, 5, 7),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn missing_minor_reports_absence_not_error() {
        // Two triangles sharing a vertex: the walk intersection graph is a
        // single edge, which is not 0-degenerate but has no K_3 minor.
        let mut g = Digraph::new(5);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)] {
            g.add_arc(u, v).unwrap();
        }
        let fam = WalkFamily::new(vec![
            Walk::closed(&g, vec![0, 1, 2, 0]).unwrap(),
            Walk::closed(&g, vec![0, 3, 4, 0]).unwrap(),
        ]);
        assert!(dense_scenario(&g, &fam, 3, 0, 7).unwrap().is_none());
    }

    #[test]
    fn five_hosts_with_all_pairs_give_three_elements() {
        let pairs = all_ordered_pairs(5);
        let (g, ps, conn) = lane_instance(5, &pairs);
        let set: BTreeSet<_> = pairs.into_iter().collect();
        let b = sparse_scenario(&g, &ps, &set, &conn, 1, 3).unwrap();
        assert_eq!(b.size(), 3);
        assert!(b.congestion() <= 4);
        assert_eq!(b.touches().len(), 3);
    }

    #[test]
    fn two_hosts_only_reach_the_degenerate_outcome() {
        let pairs = vec![(0, 1), (1, 0)];
        let (g, ps, conn) = lane_instance(2, &pairs);
        let set: BTreeSet<_> = pairs.into_iter().collect();
        assert!(matches!(
            sparse_scenario(&g, &ps, &set, &conn, 1, 3),
            Err(Error::DegenerateOutcome(2))
        ));
    }

    #[test]
    fn one_way_pairs_fail_the_density_hypothesis() {
        let pairs: Vec<_> = (0..5).flat_map(|i| ((i + 1)..5).map(move |j| (i, j))).collect();
        let (g, ps, conn) = lane_instance(5, &pairs);
        let set: BTreeSet<_> = pairs.into_iter().collect();
        assert!(matches!(
            sparse_scenario(&g, &ps, &set, &conn, 1, 3),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn connector_congestion_above_alpha_is_reported() {
        let pairs = all_ordered_pairs(5);
        let (g, ps, conn) = lane_instance(5, &pairs);
        let set: BTreeSet<_> = pairs.into_iter().collect();
        assert!(matches!(
            sparse_scenario(&g, &ps, &set, &conn, 0, 3),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    /// Like lane_instance but with `lanes` parallel connectors per pair,
    /// bundled into linkages.
    fn linkage_instance(
        a: usize,
        lanes: usize,
        pairs: &[(usize, usize)],
    ) -> (Digraph, PathSystem, BTreeMap<(usize, usize), Linkage>) {
        let b = (a - 1) * lanes;
        let hl = 2 * b;
        let mut g = Digraph::new(a * hl + pairs.len() * lanes);
        for i in 0..a {
            for t in 0..hl - 1 {
                g.add_arc(i * hl + t, i * hl + t + 1).unwrap();
            }
        }
        let mut raw: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let out_slot = j - usize::from(j > i);
            let in_slot = i - usize::from(i > j);
            for l in 0..lanes {
                let mid = a * hl + k * lanes + l;
                let start = i * hl + b + out_slot * lanes + l;
                let end = j * hl + in_slot * lanes + l;
                g.add_arc(start, mid).unwrap();
                g.add_arc(mid, end).unwrap();
                raw.entry((i, j)).or_default().push(vec![start, mid, end]);
            }
        }
        let paths: Vec<Vec<usize>> = (0..a).map(|i| (i * hl..(i + 1) * hl).collect()).collect();
        let a_sets = (0..a).map(|i| (i * hl..i * hl + b).collect()).collect();
        let b_sets = (0..a).map(|i| (i * hl + b..(i + 1) * hl).collect()).collect();
        let ps = PathSystem::new(&g, paths, a_sets, b_sets).unwrap();
        let linkages = raw
            .into_iter()
            .map(|(k, seqs)| {
                let paths: Vec<Path> =
                    seqs.into_iter().map(|s| Path::new(&g, s).unwrap()).collect();
                let sources = paths.iter().map(|p| p.first()).collect();
                let sinks = paths.iter().map(|p| p.last()).collect();
                (k, Linkage::new(paths, sources, sinks).unwrap())
            })
            .collect();
        (g, ps, linkages)
    }

    #[test]
    fn wrapped_route_picks_disjoint_lanes_and_delegates() {
        let pairs = all_ordered_pairs(3);
        let (g, ps, linkages) = linkage_instance(3, 2, &pairs);
        let set: BTreeSet<_> = pairs.into_iter().collect();
        let b = sparse_wrapped(&g, &ps, &set, &linkages, 1, 11).unwrap();
        assert_eq!(b.size(), 3);
        assert!(b.congestion() <= 4);
    }

    #[test]
    fn heavily_crossing_linkages_are_rejected() {
        // Hosts 0..4 and 4..8; every reverse path runs through one middle
        // vertex of each forward path, so the crossing graph is K_{2,2}.
        let mut g = Digraph::new(12);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)] {
            g.add_arc(u, v).unwrap();
        }
        for (u, v) in [
            (2, 8),
            (8, 10),
            (10, 4),
            (3, 9),
            (9, 11),
            (11, 5),
            (6, 8),
            (8, 9),
            (9, 0),
            (7, 10),
            (10, 11),
            (11, 1),
        ] {
            g.add_arc(u, v).unwrap();
        }
        let ps = PathSystem::new(
            &g,
            vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
            vec![[0, 1].into_iter().collect(), [4, 5].into_iter().collect()],
            vec![[2, 3].into_iter().collect(), [6, 7].into_iter().collect()],
        )
        .unwrap();
        let lk01 = Linkage::new(
            vec![
                Path::new(&g, vec![2, 8, 10, 4]).unwrap(),
                Path::new(&g, vec![3, 9, 11, 5]).unwrap(),
            ],
            [2, 3].into_iter().collect(),
            [4, 5].into_iter().collect(),
        )
        .unwrap();
        let lk10 = Linkage::new(
            vec![
                Path::new(&g, vec![6, 8, 9, 0]).unwrap(),
                Path::new(&g, vec![7, 10, 11, 1]).unwrap(),
            ],
            [6, 7].into_iter().collect(),
            [0, 1].into_iter().collect(),
        )
        .unwrap();
        let set: BTreeSet<_> = [(0, 1), (1, 0)].into_iter().collect();
        let linkages: BTreeMap<_, _> = [((0, 1), lk01), ((1, 0), lk10)].into_iter().collect();
        assert!(matches!(
            sparse_wrapped(&g, &ps, &set, &linkages, 1, 5),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn bramble_json_survives_a_round_trip_with_and_without_witnesses() {
        let (g, fam) = hub(6);
        let b = dense_scenario(&g, &fam, 3, 2, 7).unwrap().unwrap();
        let restored = Bramble::from_json(&g, &b.to_json()).unwrap();
        assert_eq!(restored.elements(), b.elements());
        assert_eq!(restored.congestion(), b.congestion());

        let mut v: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
        v.as_object_mut().unwrap().remove("witnesses");
        let rebuilt = Bramble::from_json(&g, &v.to_string()).unwrap();
        assert_eq!(rebuilt.elements(), b.elements());
    }

    #[test]
    fn merging_needs_a_shared_vertex_somewhere() {
        let mut g = Digraph::new(6);
        for (u, v) in [(0, 1), (1, 0), (1, 2), (2, 1), (3, 4), (4, 3)] {
            g.add_arc(u, v).unwrap();
        }
        let w01 = Walk::closed(&g, vec![0, 1, 0]).unwrap();
        let w12 = Walk::closed(&g, vec![1, 2, 1]).unwrap();
        let w34 = Walk::closed(&g, vec![3, 4, 3]).unwrap();
        let merged = merge_closed_walks(&g, &[w01.clone(), w12.clone()]).unwrap();
        assert!(merged.is_closed());
        assert_eq!(merged.vertex_set(), [0, 1, 2].into_iter().collect());
        assert!(matches!(merge_closed_walks(&g, &[]), Err(Error::EmptySet)));
        assert!(matches!(
            merge_closed_walks(&g, &[w01, w34]),
            Err(Error::Internal(_))
        ));
    }
}
