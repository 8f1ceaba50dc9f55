//! Threaded linkages: a linkage strung onto one long walk by connector
//! threads. Built from a path system by detouring around permutation cycles
//! of forward/backward linkages, then refined into either a family of
//! anchored closed walks or an untangled threaded linkage.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linkage::{find_disjoint_paths, Linkage, PathSystem};
use crate::walk::{overlap, shortcut_to_path, Path, Walk, WalkFamily};

/// A walk of the form L_1, Q_1, L_2, ..., Q_{l-1}, L_l where the L's are
/// the paths of a linkage in order of appearance and the threads Q_i are
/// paths sharing exactly their endpoints with the neighboring L's.
#[derive(Debug, Clone)]
pub struct ThreadedLinkage {
    walk: Walk,
    linkage: Linkage,
    // Inclusive position range of each linkage path inside the walk. A
    // thread occupies [spans[t].1, spans[t+1].0], endpoints shared.
    spans: Vec<(usize, usize)>,
    untangled: bool,
}

impl ThreadedLinkage {
    /// Validates the full concatenation shape and computes untangledness
    /// from scratch; builders never get to assert it themselves.
    pub fn new(
        g: &Digraph,
        walk: Walk,
        linkage: Linkage,
        spans: Vec<(usize, usize)>,
    ) -> Result<ThreadedLinkage> {
        Self::build(g, walk, linkage, spans, true)
    }

    /// Like `new`, but the pieces between consecutive linkage paths may be
    /// arbitrary walk segments instead of paths. Crossing constructions only
    /// rely on span order and slicing, so walks that revisit a vertex
    /// between two of their paths still fit here.
    pub fn with_walk_threads(
        g: &Digraph,
        walk: Walk,
        linkage: Linkage,
        spans: Vec<(usize, usize)>,
    ) -> Result<ThreadedLinkage> {
        Self::build(g, walk, linkage, spans, false)
    }

    fn build(
        g: &Digraph,
        walk: Walk,
        linkage: Linkage,
        spans: Vec<(usize, usize)>,
        path_threads: bool,
    ) -> Result<ThreadedLinkage> {
        if walk.is_closed() {
            return Err(Error::NotOpenWalk);
        }
        let ell = linkage.len();
        if ell == 0 {
            return Err(Error::EmptySet);
        }
        if spans.len() != ell {
            return Err(Error::SizeMismatch(spans.len(), ell));
        }
        let seq = walk.seq();
        if spans[0].0 != 0 || spans[ell - 1].1 != seq.len() - 1 {
            return Err(Error::Internal(
                "walk must start with the first linkage path and end with the last".into(),
            ));
        }
        for (t, &(s, e)) in spans.iter().enumerate() {
            if s > e || e >= seq.len() {
                return Err(Error::Internal(format!("span {t} out of bounds")));
            }
            if t + 1 < ell && spans[t + 1].0 <= e {
                return Err(Error::Internal(format!("spans {t} and {} collide", t + 1)));
            }
            if seq[s..=e] != *linkage.paths()[t].seq() {
                return Err(Error::Internal(format!(
                    "walk segment {t} differs from its linkage path"
                )));
            }
        }
        if path_threads {
            for t in 0..ell.saturating_sub(1) {
                let lo = spans[t].1;
                let hi = spans[t + 1].0;
                Path::new(g, seq[lo..=hi].to_vec())?;
            }
        }
        let untangled = compute_untangled(seq, &spans, &linkage);
        Ok(ThreadedLinkage { walk, linkage, spans, untangled })
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    /// Position range of each linkage path inside the walk.
    pub fn spans(&self) -> &[(usize, usize)] {
        &self.spans
    }

    /// Position ranges of the threads (shared-endpoint convention).
    pub fn thread_bounds(&self) -> Vec<(usize, usize)> {
        (0..self.spans.len().saturating_sub(1))
            .map(|t| (self.spans[t].1, self.spans[t + 1].0))
            .collect()
    }

    pub fn threads(&self) -> Vec<&[usize]> {
        self.thread_bounds()
            .into_iter()
            .map(|(lo, hi)| &self.walk.seq()[lo..=hi])
            .collect()
    }

    pub fn size(&self) -> usize {
        self.linkage.len()
    }

    pub fn overlap(&self) -> usize {
        overlap(std::iter::once(&self.walk))
    }

    pub fn is_untangled(&self) -> bool {
        self.untangled
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            walk: &'a [usize],
            spans: &'a [(usize, usize)],
            untangled: bool,
        }
        serde_json::to_string_pretty(&Dump {
            walk: self.walk.seq(),
            spans: &self.spans,
            untangled: self.untangled,
        })
        .expect("dump serializes")
    }
}

/// A thread may meet the rest of the walk only inside its two neighboring
/// linkage paths. Checked literally against vertex occurrence positions.
fn compute_untangled(seq: &[usize], spans: &[(usize, usize)], linkage: &Linkage) -> bool {
    let mut positions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, &v) in seq.iter().enumerate() {
        positions.entry(v).or_default().push(pos);
    }
    for t in 0..spans.len().saturating_sub(1) {
        let lo = spans[t].1;
        let hi = spans[t + 1].0;
        let allowed: BTreeSet<usize> = linkage.paths()[t]
            .seq()
            .iter()
            .chain(linkage.paths()[t + 1].seq())
            .copied()
            .collect();
        for &v in &seq[lo..=hi] {
            if allowed.contains(&v) {
                continue;
            }
            if positions[&v].iter().any(|&p| p < lo || p > hi) {
                return false;
            }
        }
    }
    true
}

/// Closed walks each carrying one or more labeled anchor paths; anchors
/// with the same label must be pairwise distinct across the family.
#[derive(Debug, Clone)]
pub struct AnchoredWalkFamily {
    family: WalkFamily,
    anchors: Vec<Vec<(usize, Path)>>,
}

impl AnchoredWalkFamily {
    pub fn new(walks: Vec<Walk>, anchors: Vec<Vec<(usize, Path)>>) -> Result<AnchoredWalkFamily> {
        if walks.len() != anchors.len() {
            return Err(Error::SizeMismatch(walks.len(), anchors.len()));
        }
        for (w, anc) in walks.iter().zip(&anchors) {
            if !w.is_closed() {
                return Err(Error::NotClosed);
            }
            if anc.is_empty() {
                return Err(Error::EmptySet);
            }
            for (label, path) in anc {
                if !w.contains_contiguous(path.seq()) {
                    return Err(Error::Internal(format!(
                        "label-{label} anchor is not a contiguous subwalk of its walk"
                    )));
                }
            }
        }
        let mut by_label: BTreeMap<usize, Vec<&[usize]>> = BTreeMap::new();
        for anc in &anchors {
            for (label, path) in anc {
                by_label.entry(*label).or_default().push(path.seq());
            }
        }
        for (label, paths) in &by_label {
            for i in 0..paths.len() {
                for j in (i + 1)..paths.len() {
                    if paths[i] == paths[j] {
                        return Err(Error::Internal(format!(
                            "label-{label} anchors repeat a path"
                        )));
                    }
                }
            }
        }
        Ok(AnchoredWalkFamily { family: WalkFamily::new(walks), anchors })
    }

    pub fn walks(&self) -> &[Walk] {
        self.family.walks()
    }

    pub fn family(&self) -> &WalkFamily {
        &self.family
    }

    pub fn anchors(&self) -> &[Vec<(usize, Path)>] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn overlap(&self) -> usize {
        self.family.overlap()
    }

    pub fn congestion(&self) -> usize {
        self.family.congestion()
    }
}

/// Strings every path of a size-b linkage from B_i to A_j onto one walk of
/// overlap at most 3. Forward and backward linkages compose to a
/// permutation; each permutation cycle becomes a closed detour hanging off
/// P_i, and the walk runs along P_i from detour to detour.
pub fn build_threaded_linkage(
    g: &Digraph,
    ps: &PathSystem,
    i: usize,
    j: usize,
) -> Result<ThreadedLinkage> {
    if i == j {
        return Err(Error::PreconditionUnmet(
            "threaded linkage needs two distinct system paths".into(),
        ));
    }
    let a = ps.a_count();
    if i >= a || j >= a {
        return Err(Error::VertexOutOfRange(i.max(j), a));
    }
    let nothing = BTreeSet::new();
    let forward = find_disjoint_paths(g, ps.b_set(i), ps.a_set(j), &nothing)?
        .ok_or(Error::NoLinkage(i, j))?;
    let backward = find_disjoint_paths(g, ps.a_set(j), ps.b_set(i), &nothing)?
        .ok_or(Error::NoLinkage(j, i))?;

    let b = forward.len();
    let bwd_by_start: BTreeMap<usize, usize> = backward
        .paths()
        .iter()
        .enumerate()
        .map(|(t, p)| (p.first(), t))
        .collect();
    let fwd_by_start: BTreeMap<usize, usize> = forward
        .paths()
        .iter()
        .enumerate()
        .map(|(t, p)| (p.first(), t))
        .collect();
    // rho: forward path -> backward path leaving its endpoint; pi: forward
    // path -> forward path fed by that backward path. pi permutes 0..b.
    let rho: Vec<usize> = (0..b)
        .map(|t| bwd_by_start[&forward.paths()[t].last()])
        .collect();
    let pi: Vec<usize> = (0..b)
        .map(|t| fwd_by_start[&backward.paths()[rho[t]].last()])
        .collect();
    {
        let image: BTreeSet<usize> = pi.iter().copied().collect();
        if image.len() != b {
            return Err(Error::Internal("linkage composition is not a permutation".into()));
        }
    }

    let host = &ps.paths()[i];
    let pos_on_host = |t: usize| -> Result<usize> {
        host.position_of(forward.paths()[t].first())
            .ok_or_else(|| Error::Internal("forward path does not start on the host path".into()))
    };

    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; b];
    for start in 0..b {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut t = start;
        while !seen[t] {
            seen[t] = true;
            cyc.push(t);
            t = pi[t];
        }
        // Rotate so the cycle begins at its representative: the member
        // whose start vertex comes first along the host path.
        let mut rep = 0;
        for (k, &m) in cyc.iter().enumerate() {
            if pos_on_host(m)? < pos_on_host(cyc[rep])? {
                rep = k;
            }
        }
        cyc.rotate_left(rep);
        cycles.push(cyc);
    }
    let mut keyed: Vec<(usize, Vec<usize>)> = Vec::new();
    for cyc in cycles {
        keyed.push((pos_on_host(cyc[0])?, cyc));
    }
    keyed.sort_by_key(|&(pos, _)| pos);
    let cycles: Vec<Vec<usize>> = keyed.into_iter().map(|(_, c)| c).collect();

    let mut seq: Vec<usize> = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut ordered: Vec<Path> = Vec::new();
    let mut used_backward = vec![false; b];
    let mut emitted = 0;
    'outer: for (ci, cyc) in cycles.iter().enumerate() {
        for (k, &f) in cyc.iter().enumerate() {
            let fp = &forward.paths()[f];
            let start_pos = if seq.is_empty() {
                seq.extend_from_slice(fp.seq());
                0
            } else {
                let at = seq.len() - 1;
                if seq[at] != fp.first() {
                    return Err(Error::Internal("detour does not meet the next path".into()));
                }
                seq.extend_from_slice(&fp.seq()[1..]);
                at
            };
            spans.push((start_pos, seq.len() - 1));
            ordered.push(fp.clone());
            emitted += 1;
            if emitted == b {
                // Trimming: everything after the final linkage path (its
                // backward return and the rest of P_i) is dropped.
                break 'outer;
            }
            let bt = rho[f];
            if used_backward[bt] {
                return Err(Error::Internal("backward path reused".into()));
            }
            used_backward[bt] = true;
            let mut raw: Vec<usize> = backward.paths()[bt].seq().to_vec();
            if k == cyc.len() - 1 {
                // The detour has closed at this cycle's representative;
                // continue along the host path to the next representative.
                let here = pos_on_host(cyc[0])?;
                let next = pos_on_host(cycles[ci + 1][0])?;
                if here >= next {
                    return Err(Error::Internal("cycle representatives out of order".into()));
                }
                raw.extend_from_slice(&host.seq()[here + 1..=next]);
            }
            let thread = shortcut_to_path(g, &Walk::open(g, raw)?)?;
            seq.extend_from_slice(&thread.seq()[1..]);
        }
    }

    let linkage = Linkage::new(ordered, ps.b_set(i).clone(), ps.a_set(j).clone())?;
    let tl = ThreadedLinkage::new(g, Walk::open(g, seq)?, linkage, spans)?;
    if tl.overlap() > 3 {
        return Err(Error::Internal(format!(
            "threaded linkage overlap {} exceeds 3",
            tl.overlap()
        )));
    }
    Ok(tl)
}

/// Non-overlapping useful walks of (seq, spans), greedily chosen with
/// minimal end position, then minimal start. Returns (start, end, anchor)
/// triples where anchor indexes the first linkage path inside the range.
fn scan_useful_walks(seq: &[usize], spans: &[(usize, usize)]) -> Vec<(usize, usize, usize)> {
    let mut positions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, &v) in seq.iter().enumerate() {
        positions.entry(v).or_default().push(pos);
    }
    let starts: Vec<usize> = spans.iter().map(|s| s.0).collect();
    let ends: Vec<usize> = spans.iter().map(|s| s.1).collect();
    let mut out = Vec::new();
    let mut scan = 0usize;
    for q in 1..seq.len() {
        if q <= scan {
            continue;
        }
        let list = &positions[&seq[q]];
        let idx = list.partition_point(|&r| r < scan);
        if idx >= list.len() || list[idx] >= q {
            continue;
        }
        let p = list[idx];
        // A full linkage path sits inside [p, q] iff the last path ending
        // by q starts no earlier than p.
        let m = ends.partition_point(|&e| e <= q);
        if m == 0 || p > starts[m - 1] {
            continue;
        }
        let anchor = starts.partition_point(|&s| s < p);
        out.push((p, q, anchor));
        scan = q + 1;
    }
    out
}

/// Refinement outcome: enough anchored closed walks, or an untangled
/// threaded sub-linkage of size at least x.
#[derive(Debug, Clone)]
pub enum RefineOutcome {
    ClosedWalks(AnchoredWalkFamily),
    Untangled(ThreadedLinkage),
}

/// Requires size >= x*d + (d-1). Finds useful walks greedily; d or more of
/// them yield outcome 1 (all of them, each anchored by a distinct linkage
/// path, label 0). Otherwise the gap between consecutive useful-walk end
/// positions holding the most complete linkage paths is cut out, trimmed
/// to path boundaries, and returned untangled.
pub fn refine_threaded_linkage(
    g: &Digraph,
    tl: &ThreadedLinkage,
    x: usize,
    d: usize,
) -> Result<RefineOutcome> {
    if x == 0 || d == 0 {
        return Err(Error::Internal("refinement parameters must be positive".into()));
    }
    let need = x * d + (d - 1);
    if tl.size() < need {
        return Err(Error::SizeTooSmall { size: tl.size(), need });
    }
    let seq = tl.walk().seq();
    let spans = tl.spans();
    let useful = scan_useful_walks(seq, spans);

    if useful.len() >= d {
        let mut walks = Vec::with_capacity(useful.len());
        let mut anchors = Vec::with_capacity(useful.len());
        for &(p, q, t) in &useful {
            walks.push(Walk::closed(g, seq[p..=q].to_vec())?);
            anchors.push(vec![(0usize, tl.linkage().paths()[t].clone())]);
        }
        let fam = AnchoredWalkFamily::new(walks, anchors)?;
        if fam.overlap() > tl.overlap() {
            return Err(Error::Internal("refined walks exceed the input overlap".into()));
        }
        return Ok(RefineOutcome::ClosedWalks(fam));
    }

    // Gap ranges: the walk minus the useful-walk end positions.
    let mut gaps: Vec<(usize, usize)> = Vec::new();
    let mut lo = 0usize;
    for &(_, q, _) in &useful {
        if q > lo {
            gaps.push((lo, q - 1));
        }
        lo = q + 1;
    }
    if lo < seq.len() {
        gaps.push((lo, seq.len() - 1));
    }
    let starts: Vec<usize> = spans.iter().map(|s| s.0).collect();
    let ends: Vec<usize> = spans.iter().map(|s| s.1).collect();
    let mut best: Option<(usize, usize, usize)> = None; // (count, first, last)
    for &(glo, ghi) in &gaps {
        let first = starts.partition_point(|&s| s < glo);
        let upto = ends.partition_point(|&e| e <= ghi);
        if upto > first {
            let count = upto - first;
            if best.map_or(true, |(c, _, _)| count > c) {
                best = Some((count, first, upto - 1));
            }
        }
    }
    let Some((count, first, last)) = best else {
        return Err(Error::Internal("no gap holds a complete linkage path".into()));
    };
    if count < x {
        return Err(Error::Internal(format!(
            "best gap holds {count} paths, below the guaranteed {x}"
        )));
    }
    let w_lo = spans[first].0;
    let w_hi = spans[last].1;
    let sub_spans: Vec<(usize, usize)> = spans[first..=last]
        .iter()
        .map(|&(s, e)| (s - w_lo, e - w_lo))
        .collect();
    let keep: Vec<usize> = (first..=last).collect();
    let out = ThreadedLinkage::new(
        g,
        Walk::open(g, seq[w_lo..=w_hi].to_vec())?,
        tl.linkage().restrict(&keep)?,
        sub_spans,
    )?;
    if !out.is_untangled() {
        return Err(Error::Internal("refined segment is tangled".into()));
    }
    if !scan_useful_walks(out.walk().seq(), out.spans()).is_empty() {
        return Err(Error::Internal("refined segment still has a useful walk".into()));
    }
    Ok(RefineOutcome::Untangled(out))
}
