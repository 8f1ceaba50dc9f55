//! End-to-end pipeline: from an (a,b) path system to a bramble of
//! congestion at most 8.
//!
//! Every ordered pair of system paths is threaded and refined, splitting
//! the pairs into those that already produced anchored closed walks and
//! those holding an untangled threaded linkage. Crossing tests between the
//! per-pair linkages build two nested edge sets; maximal matchings over
//! those feed the crossing construction, and a three-way case analysis
//! picks which sparse route finishes the job. A dense shortcut fires first
//! whenever one or two of the collected walk families already cross enough
//! for a direct clique minor.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bowtie::bowtie_with_threshold;
use crate::combinatorics::{
    degeneracy, intersection_graph, intersection_graph_bipartite, is_degenerate,
    maximal_matching, UGraph,
};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linkage::{validate_path_system, Linkage, PathSystem, DEFAULT_WELL_LINKED_BOUND};
use crate::scenarios::{dense_scenario, sparse_scenario, sparse_wrapped, Bramble};
use crate::threading::{
    build_threaded_linkage, refine_threaded_linkage, AnchoredWalkFamily, RefineOutcome,
    ThreadedLinkage,
};
use crate::walk::{congestion_of_sets, Path, Walk, WalkFamily};

/// Coefficient in front of k^2 sqrt(1 + log2 k) for the path count.
pub const C_A: f64 = 3.0;
/// Coefficient in front of k sqrt(log2 k) for the innermost density bound.
pub const C_KT: f64 = 1.0;

const SPLIT: f64 = 2560.0; // 2^9 * 5, the crossing construction's share

type PairKey = (usize, usize);
type EdgeKey = (PairKey, PairKey);

/// Parameter schedule. The exact values follow the analysis and blow up
/// doubly exponentially, so they are kept as f64 alongside the effective
/// values actually driving a run: exact scaled by `sigma`, floored,
/// clamped to at least 1 and saturating at usize::MAX.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineParams {
    pub k: usize,
    pub sigma: f64,
    pub seed: u64,
    pub a_exact: f64,
    pub b_exact: f64,
    pub d1_exact: f64,
    pub d2_exact: f64,
    pub d3_exact: f64,
    pub a: usize,
    pub b: usize,
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

/// Desk-scale replacements for individual effective parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub d3: Option<usize>,
}

impl PipelineParams {
    pub fn with_overrides(mut self, o: &Overrides) -> PipelineParams {
        if let Some(v) = o.a {
            self.a = v;
        }
        if let Some(v) = o.b {
            self.b = v;
        }
        if let Some(v) = o.d1 {
            self.d1 = v;
        }
        if let Some(v) = o.d2 {
            self.d2 = v;
        }
        if let Some(v) = o.d3 {
            self.d3 = v;
        }
        self
    }
}

fn effective(sigma: f64, exact: f64) -> usize {
    let s = (sigma * exact).floor();
    if s < 1.0 {
        1
    } else if s >= usize::MAX as f64 {
        usize::MAX
    } else {
        s as usize
    }
}

/// Evaluates the parameter chain for target order `k` and verifies its
/// internal slack: every density bound must fund the next round of
/// threading demands after losing the crossing construction's 2^9 * 5
/// share.
pub fn compute_params(k: usize, sigma: f64, seed: u64) -> Result<PipelineParams> {
    if k < 2 {
        return Err(Error::KTooSmall(k));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::Internal("sigma must be positive and finite".into()));
    }
    let e = std::f64::consts::E;
    let kf = k as f64;
    let a = (C_A * kf * kf * (1.0 + kf.log2()).sqrt()).ceil();
    let d3 = (C_KT * kf * kf.log2().sqrt()).ceil().max(1.0);
    let wave = |d_next: f64| ((1u64 << 11) as f64 * 5.0 * e * a * a * d_next).ceil();
    let d2 = wave(d3);
    let d1 = wave(d2);
    let b = (4.0 * e * a * a * d1 * d1).ceil();

    let demand = |d_next: f64| 4.0 * e * a * a * d_next;
    if d1 / SPLIT + 1e-9 < demand(d2) || d2 / SPLIT + 1e-9 < demand(d3) {
        return Err(Error::Internal("parameter chain lost its slack".into()));
    }
    let x = demand(d1).floor() + 1.0;
    let d = (d1 / SPLIT).ceil();
    if x * d + (d - 1.0) > b + 1e-9 {
        return Err(Error::Internal("marked sets cannot fund the refinement split".into()));
    }

    Ok(PipelineParams {
        k,
        sigma,
        seed,
        a_exact: a,
        b_exact: b,
        d1_exact: d1,
        d2_exact: d2,
        d3_exact: d3,
        a: effective(sigma, a).max(2),
        b: effective(sigma, b),
        d1: effective(sigma, d1),
        d2: effective(sigma, d2),
        d3: effective(sigma, d3),
    })
}

/// Anchored walks produced by crossing the linkages of two pairs, plus
/// which pair carries which anchor label.
#[derive(Debug, Clone)]
pub struct EdgeFamily {
    pub family: AnchoredWalkFamily,
    pub label0: PairKey,
    pub label1: PairKey,
}

/// Everything classify_pairs learns about the instance.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub pairs: BTreeSet<PairKey>,
    /// Pairs whose refinement yielded anchored closed walks.
    pub z: BTreeSet<PairKey>,
    pub z_families: BTreeMap<PairKey, AnchoredWalkFamily>,
    /// The anchored stretch of each z walk, re-threaded over just the
    /// anchor paths so it can enter the crossing construction.
    pub z_crossers: BTreeMap<PairKey, ThreadedLinkage>,
    pub untangled: BTreeMap<PairKey, ThreadedLinkage>,
    pub e1: BTreeSet<EdgeKey>,
    pub e2: BTreeSet<EdgeKey>,
    pub m1: Vec<EdgeKey>,
    pub m2: Vec<EdgeKey>,
    pub edge_families: BTreeMap<EdgeKey, EdgeFamily>,
    /// Replacement linkages: anchor paths for z pairs and for matched
    /// pairs, keyed by pair.
    pub final_linkages: BTreeMap<PairKey, Linkage>,
    pub x: usize,
    pub d_thread: usize,
}

fn endpoint_set(edges: &[EdgeKey]) -> BTreeSet<PairKey> {
    edges.iter().flat_map(|&(u, v)| [u, v]).collect()
}

/// Cuts the walk of a refined pair down to the stretch from its first
/// anchor to its last and re-threads it over the anchor paths alone. The
/// pieces between anchors are walk segments, not paths, hence the relaxed
/// constructor.
fn crosser_from_family(
    g: &Digraph,
    tl: &ThreadedLinkage,
    fam: &AnchoredWalkFamily,
) -> Result<ThreadedLinkage> {
    let mut idxs = Vec::with_capacity(fam.len());
    for anc in fam.anchors() {
        let p = &anc[0].1;
        let t = tl
            .linkage()
            .paths()
            .iter()
            .position(|q| q.seq() == p.seq())
            .ok_or_else(|| Error::Internal("anchor path missing from its linkage".into()))?;
        idxs.push(t);
    }
    idxs.sort_unstable();
    idxs.dedup();
    if idxs.len() != fam.len() {
        return Err(Error::Internal("anchor paths are not distinct".into()));
    }
    let w_lo = tl.spans()[idxs[0]].0;
    let w_hi = tl.spans()[*idxs.last().unwrap()].1;
    let spans: Vec<(usize, usize)> = idxs
        .iter()
        .map(|&t| (tl.spans()[t].0 - w_lo, tl.spans()[t].1 - w_lo))
        .collect();
    let sub = Walk::open(g, tl.walk().seq()[w_lo..=w_hi].to_vec())?;
    ThreadedLinkage::with_walk_threads(g, sub, tl.linkage().restrict(&idxs)?, spans)
}

/// Linkage built from the label-`label` anchor of every walk in an edge
/// family, ordered as in the endpoint's own crossing linkage.
fn anchor_linkage(source: &ThreadedLinkage, ef: &EdgeFamily, label: usize) -> Result<Linkage> {
    let mut picked = Vec::with_capacity(ef.family.len());
    for anc in ef.family.anchors() {
        let (_, p) = anc
            .iter()
            .find(|(l, _)| *l == label)
            .ok_or_else(|| Error::Internal(format!("walk lacks a label-{label} anchor")))?;
        let t = source
            .linkage()
            .paths()
            .iter()
            .position(|q| q.seq() == p.seq())
            .ok_or_else(|| Error::Internal("anchor is not a path of its endpoint".into()))?;
        picked.push(t);
    }
    picked.sort_unstable();
    picked.dedup();
    if picked.len() != ef.family.len() {
        return Err(Error::Internal("anchor paths are not distinct".into()));
    }
    source.linkage().restrict(&picked)
}

/// Threads and refines every ordered pair, runs the crossing tests at both
/// density levels, picks the two matchings and crosses their edges.
pub fn classify_pairs(
    g: &Digraph,
    ps: &PathSystem,
    params: &PipelineParams,
) -> Result<PairClassification> {
    let a = ps.a_count();
    if a != params.a {
        return Err(Error::HypothesisUnmet(format!(
            "path system has {a} paths, parameters expect {}",
            params.a
        )));
    }
    if ps.set_size() != params.b {
        return Err(Error::HypothesisUnmet(format!(
            "marked sets have {} vertices, parameters expect {}",
            ps.set_size(),
            params.b
        )));
    }
    if params.d1 < params.d2 || params.d2 < params.d3 || params.d3 == 0 {
        return Err(Error::HypothesisUnmet(format!(
            "density bounds must not increase: d1 {} d2 {} d3 {}",
            params.d1, params.d2, params.d3
        )));
    }

    let e = std::f64::consts::E;
    let d_thread = params.d1.div_ceil(SPLIT as usize);
    if params.b + 1 < 2 * d_thread {
        return Err(Error::HypothesisUnmet(
            "marked sets too small for the refinement split".into(),
        ));
    }
    let x_cap = (params.b - (d_thread - 1)) / d_thread;
    let x_raw = 4.0 * e * (params.a as f64) * (params.a as f64) * (params.d1 as f64);
    let x = if x_raw >= x_cap as f64 {
        x_cap
    } else {
        (x_raw.floor() as usize + 1).min(x_cap)
    };
    if x == 0 {
        return Err(Error::HypothesisUnmet("refinement demand collapsed to zero".into()));
    }

    let mut pairs = BTreeSet::new();
    let mut z = BTreeSet::new();
    let mut z_families = BTreeMap::new();
    let mut z_crossers = BTreeMap::new();
    let mut untangled = BTreeMap::new();
    let mut final_linkages: BTreeMap<PairKey, Linkage> = BTreeMap::new();
    for i in 0..a {
        for j in 0..a {
            if i == j {
                continue;
            }
            pairs.insert((i, j));
            let tl = build_threaded_linkage(g, ps, i, j)?;
            match refine_threaded_linkage(g, &tl, x, d_thread)? {
                RefineOutcome::ClosedWalks(fam) => {
                    let crosser = crosser_from_family(g, &tl, &fam)?;
                    if crosser.size() < d_thread {
                        return Err(Error::Internal(format!(
                            "pair ({i},{j}) kept {} anchors, below {d_thread}",
                            crosser.size()
                        )));
                    }
                    final_linkages.insert((i, j), crosser.linkage().clone());
                    z_crossers.insert((i, j), crosser);
                    z_families.insert((i, j), fam);
                    z.insert((i, j));
                }
                RefineOutcome::Untangled(sub) => {
                    untangled.insert((i, j), sub);
                }
            }
        }
    }

    // Crossing tests between the per-pair linkages at both density levels.
    let plist: Vec<PairKey> = pairs.iter().copied().collect();
    let path_sets: Vec<Vec<BTreeSet<usize>>> = plist
        .iter()
        .map(|p| {
            let lk = if z.contains(p) { z_crossers[p].linkage() } else { untangled[p].linkage() };
            lk.paths().iter().map(|q| q.vertex_set()).collect()
        })
        .collect();
    let mut e1 = BTreeSet::new();
    let mut e2 = BTreeSet::new();
    for u in 0..plist.len() {
        for w in (u + 1)..plist.len() {
            let ig = intersection_graph_bipartite(&path_sets[u], &path_sets[w]);
            let (deg, _) = degeneracy(&ig);
            if deg > params.d1 {
                e1.insert((plist[u], plist[w]));
            }
            if deg > params.d2 {
                e2.insert((plist[u], plist[w]));
            }
        }
    }
    if !e1.is_subset(&e2) {
        return Err(Error::Internal("coarse crossings missing from the fine level".into()));
    }

    let pos: BTreeMap<PairKey, usize> = plist.iter().enumerate().map(|(t, &p)| (p, t)).collect();
    let mut h1 = UGraph::new(plist.len());
    for &(u, w) in &e1 {
        h1.add_edge(pos[&u], pos[&w])?;
    }
    let z_ids: BTreeSet<usize> = z.iter().map(|p| pos[p]).collect();
    let m1: Vec<EdgeKey> =
        maximal_matching(&h1, &z_ids).into_iter().map(|(u, w)| (plist[u], plist[w])).collect();
    let vm1 = endpoint_set(&m1);

    let blocked: BTreeSet<usize> =
        vm1.iter().chain(z.iter()).map(|p| pos[p]).collect();
    let mut h2 = UGraph::new(plist.len());
    for &(u, w) in &e2 {
        if !(blocked.contains(&pos[&u]) && blocked.contains(&pos[&w])) {
            h2.add_edge(pos[&u], pos[&w])?;
        }
    }
    let m2: Vec<EdgeKey> =
        maximal_matching(&h2, &BTreeSet::new()).into_iter().map(|(u, w)| (plist[u], plist[w])).collect();

    // Cross every matched edge. The untangled endpoint goes first so the
    // sharper congestion clause applies.
    let mut edge_families = BTreeMap::new();
    for (edges, level_d, cap) in [(&m1, params.d1, 2usize), (&m2, params.d2, 4usize)] {
        let d_bow = level_d.div_ceil(SPLIT as usize);
        for &(pu, pw) in edges {
            let rank = |p: &PairKey| usize::from(z.contains(p));
            let (l0, l1) = if rank(&pu) <= rank(&pw) { (pu, pw) } else { (pw, pu) };
            let tl_of = |p: &PairKey| -> &ThreadedLinkage {
                if z.contains(p) {
                    &z_crossers[p]
                } else {
                    &untangled[p]
                }
            };
            let fam = bowtie_with_threshold(g, tl_of(&l0), tl_of(&l1), d_bow, level_d)?;
            if fam.congestion() > cap {
                return Err(Error::Internal(format!(
                    "crossing family for {pu:?}/{pw:?} has congestion {}, cap {cap}",
                    fam.congestion()
                )));
            }
            if fam.len() < d_bow {
                return Err(Error::Internal(format!(
                    "crossing family for {pu:?}/{pw:?} has {} walks, need {d_bow}",
                    fam.len()
                )));
            }
            let ef = EdgeFamily { family: fam, label0: l0, label1: l1 };
            for (p, label) in [(l0, 0usize), (l1, 1usize)] {
                if z.contains(&p) || final_linkages.contains_key(&p) {
                    continue;
                }
                final_linkages.insert(p, anchor_linkage(tl_of(&p), &ef, label)?);
            }
            edge_families.insert((pu.min(pw), pu.max(pw)), ef);
        }
    }

    Ok(PairClassification {
        pairs,
        z,
        z_families,
        z_crossers,
        untangled,
        e1,
        e2,
        m1,
        m2,
        edge_families,
        final_linkages,
        x,
        d_thread,
    })
}

/// Which of the three finishing routes applies. Verifies the structural
/// facts the counting argument rests on, then returns the first case whose
/// pair share reaches six tenths.
pub fn case_analysis(
    pairs: &BTreeSet<PairKey>,
    z: &BTreeSet<PairKey>,
    m1: &[EdgeKey],
    m2: &[EdgeKey],
) -> Result<usize> {
    let n = pairs.len();
    if n == 0 {
        return Err(Error::ClassificationCorrupt("no pairs to classify".into()));
    }
    if !z.iter().all(|p| pairs.contains(p)) {
        return Err(Error::ClassificationCorrupt("z pair outside the universe".into()));
    }
    for (name, m) in [("first", m1), ("second", m2)] {
        let mut seen = BTreeSet::new();
        for &(u, w) in m {
            if !pairs.contains(&u) || !pairs.contains(&w) || u == w {
                return Err(Error::ClassificationCorrupt(format!(
                    "{name} matching has a malformed edge"
                )));
            }
            if !seen.insert(u) || !seen.insert(w) {
                return Err(Error::ClassificationCorrupt(format!(
                    "{name} matching reuses an endpoint"
                )));
            }
        }
    }
    let vm1 = endpoint_set(m1);
    let vm2 = endpoint_set(m2);
    if vm1.intersection(z).next().is_some() {
        return Err(Error::ClassificationCorrupt(
            "first matching touches an anchored pair".into(),
        ));
    }
    let held: BTreeSet<PairKey> = vm1.union(z).copied().collect();
    for &(u, w) in m2 {
        if held.contains(&u) && held.contains(&w) {
            return Err(Error::ClassificationCorrupt(
                "second matching edge lies wholly inside the held set".into(),
            ));
        }
    }

    let c1 = pairs.difference(&held).count();
    let c2 = held.union(&vm2).count();
    let c3 = pairs.difference(&vm2).count();
    if 2 * c1 + 2 * c2 + c3 < 3 * n {
        return Err(Error::Internal(format!(
            "counting identity failed: {c1}/{c2}/{c3} over {n}"
        )));
    }
    for (case, c) in [(1, c1), (2, c2), (3, c3)] {
        if 10 * c >= 6 * n {
            return Ok(case);
        }
    }
    Err(Error::Internal("no case reached the six-tenths share".into()))
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    /// 0 means the dense shortcut fired before the case analysis.
    pub case: usize,
    pub pair_count: usize,
    pub z_count: usize,
    pub m1_count: usize,
    pub m2_count: usize,
    pub bramble_size: usize,
    pub congestion: usize,
    /// Bramble smaller than k: allowed, but flagged.
    pub size_shortfall: bool,
    /// Construction steps that fell short of their analysis guarantee.
    pub gaps: Vec<String>,
    pub elapsed_ms: u128,
    pub seed: u64,
    pub params: PipelineParams,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Dense shortcut: for every one or two of the collected walk families,
/// if the union's intersection graph is not d3-degenerate, a K_k minor
/// over it settles the whole run. Families overlap so little that the
/// union's congestion is verified to stay within 8.
fn dense_guard(
    g: &Digraph,
    cls: &PairClassification,
    params: &PipelineParams,
    gaps: &mut Vec<String>,
) -> Result<Option<Bramble>> {
    let mut fams: Vec<&AnchoredWalkFamily> = Vec::new();
    for fam in cls.z_families.values() {
        fams.push(fam);
    }
    for ef in cls.edge_families.values() {
        fams.push(&ef.family);
    }
    let sets: Vec<Vec<BTreeSet<usize>>> = fams
        .iter()
        .map(|f| f.walks().iter().map(|w| w.vertex_set()).collect())
        .collect();
    for i in 0..fams.len() {
        for j in i..fams.len() {
            let mut union_sets = sets[i].clone();
            if j > i {
                union_sets.extend(sets[j].iter().cloned());
            }
            let ig = intersection_graph(&union_sets);
            if is_degenerate(&ig, params.d3) {
                continue;
            }
            let mut walks: Vec<Walk> = fams[i].walks().to_vec();
            if j > i {
                walks.extend(fams[j].walks().iter().cloned());
            }
            let wf = WalkFamily::new(walks);
            if wf.congestion() > 8 {
                return Err(Error::Internal(format!(
                    "family union congestion {} exceeds 8",
                    wf.congestion()
                )));
            }
            match dense_scenario(g, &wf, params.k, params.d3, params.seed ^ 0xD5)? {
                Some(b) => {
                    if b.congestion() > 8 {
                        return Err(Error::Internal(format!(
                            "dense shortcut congestion {} exceeds 8",
                            b.congestion()
                        )));
                    }
                    return Ok(Some(b));
                }
                None => {
                    gaps.push(format!(
                        "dense shortcut: no K_{} minor in a non-degenerate family union",
                        params.k
                    ));
                }
            }
        }
    }
    Ok(None)
}

fn case_one(g: &Digraph, ps: &PathSystem, cls: &PairClassification, params: &PipelineParams) -> Result<Bramble> {
    let held: BTreeSet<PairKey> =
        endpoint_set(&cls.m1).union(&cls.z).copied().collect();
    let chosen: BTreeSet<PairKey> = cls.pairs.difference(&held).copied().collect();
    for &(u, w) in &cls.e1 {
        if chosen.contains(&u) && chosen.contains(&w) {
            return Err(Error::Internal(
                "leftover pairs still cross at the coarse level".into(),
            ));
        }
    }
    let linkages: BTreeMap<PairKey, Linkage> = chosen
        .iter()
        .map(|p| (*p, cls.untangled[p].linkage().clone()))
        .collect();
    sparse_wrapped(g, ps, &chosen, &linkages, params.d1, params.seed.wrapping_add(1))
}

fn case_two(g: &Digraph, ps: &PathSystem, cls: &PairClassification, params: &PipelineParams) -> Result<Bramble> {
    // One class of closed walks per anchored pair and per matched edge,
    // each walk remembering which anchor serves which pair.
    let mut class_walks: Vec<Vec<Walk>> = Vec::new();
    let mut class_anchor: Vec<Vec<BTreeMap<PairKey, Path>>> = Vec::new();
    let mut class_of_pair: BTreeMap<PairKey, usize> = BTreeMap::new();
    for (p, fam) in &cls.z_families {
        let walks = fam.walks().to_vec();
        let anchors = fam
            .anchors()
            .iter()
            .map(|anc| [(*p, anc[0].1.clone())].into_iter().collect())
            .collect();
        class_of_pair.entry(*p).or_insert(class_walks.len());
        class_walks.push(walks);
        class_anchor.push(anchors);
    }
    for ef in cls.edge_families.values() {
        let walks = ef.family.walks().to_vec();
        let anchors = ef
            .family
            .anchors()
            .iter()
            .map(|anc| {
                anc.iter()
                    .map(|(l, p)| (if *l == 0 { ef.label0 } else { ef.label1 }, p.clone()))
                    .collect()
            })
            .collect();
        for p in [ef.label0, ef.label1] {
            class_of_pair.entry(p).or_insert(class_walks.len());
        }
        class_walks.push(walks);
        class_anchor.push(anchors);
    }

    // Disjoint representatives, one walk per class.
    let mut flat_sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_walk: Vec<usize> = Vec::new();
    for (ci, walks) in class_walks.iter().enumerate() {
        let mut class = Vec::new();
        for w in walks {
            class.push(flat_sets.len());
            class_of_walk.push(ci);
            flat_sets.push(w.vertex_set());
        }
        classes.push(class);
    }
    let mut cg = UGraph::new(flat_sets.len());
    for u in 0..flat_sets.len() {
        for v in (u + 1)..flat_sets.len() {
            if class_of_walk[u] != class_of_walk[v]
                && flat_sets[u].intersection(&flat_sets[v]).next().is_some()
            {
                cg.add_edge(u, v)?;
            }
        }
    }
    let picks = crate::combinatorics::independent_transversal(
        &cg,
        &classes,
        params.seed.wrapping_add(2),
        crate::combinatorics::DEFAULT_TRANSVERSAL_BUDGET,
    )?
    .ok_or(Error::TransversalAbsent)?;
    let local_pick: Vec<usize> = picks
        .iter()
        .enumerate()
        .map(|(ci, &global)| {
            classes[ci]
                .iter()
                .position(|&s| s == global)
                .expect("transversal pick stays in its class")
        })
        .collect();

    // The lexicographically first pairs large enough for the sparse route.
    let a = ps.a_count();
    let need = (6 * a * (a - 1)).div_ceil(10);
    let candidates: BTreeSet<PairKey> = cls
        .z
        .iter()
        .copied()
        .chain(endpoint_set(&cls.m1))
        .chain(endpoint_set(&cls.m2))
        .collect();
    if candidates.len() < need {
        return Err(Error::Internal(format!(
            "case 2 has {} held pairs, needs {need}",
            candidates.len()
        )));
    }
    let chosen: BTreeSet<PairKey> = candidates.into_iter().take(need).collect();

    let mut connectors: BTreeMap<PairKey, Path> = BTreeMap::new();
    for &p in &chosen {
        let ci = *class_of_pair
            .get(&p)
            .ok_or_else(|| Error::Internal(format!("pair {p:?} has no walk class")))?;
        let path = class_anchor[ci][local_pick[ci]]
            .get(&p)
            .ok_or_else(|| Error::Internal(format!("chosen walk lacks an anchor for {p:?}")))?
            .clone();
        connectors.insert(p, path);
    }
    let conn_sets: Vec<BTreeSet<usize>> = connectors.values().map(|p| p.vertex_set()).collect();
    if congestion_of_sets(&conn_sets) > 2 {
        return Err(Error::Internal(
            "case 2 connectors exceed congestion 2 despite disjoint walks".into(),
        ));
    }
    let b = sparse_scenario(g, ps, &chosen, &connectors, 2, params.seed.wrapping_add(4))?;
    if b.congestion() > 6 {
        return Err(Error::Internal(format!("case 2 congestion {} exceeds 6", b.congestion())));
    }
    Ok(b)
}

fn case_three(g: &Digraph, ps: &PathSystem, cls: &PairClassification, params: &PipelineParams) -> Result<Bramble> {
    let vm2 = endpoint_set(&cls.m2);
    let chosen: BTreeSet<PairKey> = cls.pairs.difference(&vm2).copied().collect();
    let linkages: BTreeMap<PairKey, Linkage> = chosen
        .iter()
        .map(|p| {
            let lk = cls
                .final_linkages
                .get(p)
                .cloned()
                .unwrap_or_else(|| cls.untangled[p].linkage().clone());
            (*p, lk)
        })
        .collect();
    sparse_wrapped(g, ps, &chosen, &linkages, params.d2, params.seed.wrapping_add(3))
}

/// Runs the whole pipeline and returns the bramble next to a run report.
/// The report flags a size shortfall instead of failing; congestion above
/// 8 is a hard error.
pub fn run_pipeline(
    g: &Digraph,
    ps: &PathSystem,
    params: &PipelineParams,
) -> Result<(Bramble, RunReport)> {
    let t0 = Instant::now();
    let shape = validate_path_system(g, ps, false, DEFAULT_WELL_LINKED_BOUND);
    if !shape.violations.is_empty() {
        return Err(Error::HypothesisUnmet(format!(
            "path system rejected: {:?}",
            shape.violations[0]
        )));
    }
    let cls = classify_pairs(g, ps, params)?;
    let mut gaps = Vec::new();

    let (case, bramble) = match dense_guard(g, &cls, params, &mut gaps)? {
        Some(b) => (0, b),
        None => {
            let case = case_analysis(&cls.pairs, &cls.z, &cls.m1, &cls.m2)?;
            let b = match case {
                1 => case_one(g, ps, &cls, params)?,
                2 => case_two(g, ps, &cls, params)?,
                _ => case_three(g, ps, &cls, params)?,
            };
            (case, b)
        }
    };
    if bramble.congestion() > 8 {
        return Err(Error::Internal(format!(
            "final congestion {} exceeds 8",
            bramble.congestion()
        )));
    }
    let report = RunReport {
        case,
        pair_count: cls.pairs.len(),
        z_count: cls.z.len(),
        m1_count: cls.m1.len(),
        m2_count: cls.m2.len(),
        bramble_size: bramble.size(),
        congestion: bramble.congestion(),
        size_shortfall: bramble.size() < params.k,
        gaps,
        elapsed_ms: t0.elapsed().as_millis(),
        seed: params.seed,
        params: params.clone(),
    };
    Ok((bramble, report))
}
