//! Walks, paths and walk families over a host digraph.
//!
//! A walk stores its full vertex sequence; consecutive entries must be arcs
//! of the host graph, which is checked once at construction. A closed walk
//! additionally starts and ends at the same vertex, and that shared vertex
//! is counted once: `occurrences` subtracts the duplicated endpoint. All
//! multiplicity-style accounting (overlap of a family, congestion of a set
//! family) lives here.

use std::collections::{BTreeMap, BTreeSet};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    seq: Vec<usize>,
    closed: bool,
}

impl Walk {
    pub fn open(g: &Digraph, seq: Vec<usize>) -> Result<Walk> {
        Self::check_arcs(g, &seq)?;
        Ok(Walk { seq, closed: false })
    }

    pub fn closed(g: &Digraph, seq: Vec<usize>) -> Result<Walk> {
        Self::check_arcs(g, &seq)?;
        if seq.first() != seq.last() || seq.len() < 2 {
            return Err(Error::NotClosed);
        }
        Ok(Walk { seq, closed: true })
    }

    fn check_arcs(g: &Digraph, seq: &[usize]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::EmptyWalk);
        }
        for w in seq.windows(2) {
            if !g.has_arc(w[0], w[1]) {
                return Err(Error::NotAnArc(w[0], w[1]));
            }
        }
        Ok(())
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn first(&self) -> usize {
        self.seq[0]
    }

    pub fn last(&self) -> usize {
        *self.seq.last().unwrap()
    }

    /// Total number of vertex occurrences (the duplicated endpoint of a
    /// closed walk counts once).
    pub fn length(&self) -> usize {
        self.seq.len() - usize::from(self.closed)
    }

    /// Number of times `v` appears on the walk; for a closed walk the start
    /// vertex is counted once, not twice.
    pub fn occurrences(&self, v: usize) -> usize {
        let raw = self.seq.iter().filter(|&&u| u == v).count();
        if self.closed && v == self.seq[0] {
            raw - 1
        } else {
            raw
        }
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.seq.iter().copied().collect()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.seq.contains(&v)
    }

    /// True iff `other`'s sequence appears as a contiguous block of this walk.
    pub fn contains_contiguous(&self, other: &[usize]) -> bool {
        if other.is_empty() || other.len() > self.seq.len() {
            return false;
        }
        self.seq.windows(other.len()).any(|w| w == other)
    }
}

/// A walk with pairwise-distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    walk: Walk,
}

impl Path {
    pub fn new(g: &Digraph, seq: Vec<usize>) -> Result<Path> {
        let walk = Walk::open(g, seq)?;
        let mut seen = BTreeSet::new();
        for &v in walk.seq() {
            if !seen.insert(v) {
                return Err(Error::RepeatedVertex(v));
            }
        }
        Ok(Path { walk })
    }

    pub fn as_walk(&self) -> &Walk {
        &self.walk
    }

    pub fn seq(&self) -> &[usize] {
        self.walk.seq()
    }

    pub fn first(&self) -> usize {
        self.walk.first()
    }

    pub fn last(&self) -> usize {
        self.walk.last()
    }

    pub fn len(&self) -> usize {
        self.walk.seq().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.walk.contains_vertex(v)
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.walk.vertex_set()
    }

    /// Index of `v` on the path, if present. Unique by distinctness.
    pub fn position_of(&self, v: usize) -> Option<usize> {
        self.walk.seq().iter().position(|&u| u == v)
    }
}

/// Repairs an open walk into a path on the same endpoints by excising, for
/// each repeated vertex scanned left to right, everything between its first
/// and last occurrence. Keeps only vertices of the original walk and
/// preserves the first and last vertex.
pub fn shortcut_to_path(g: &Digraph, walk: &Walk) -> Result<Path> {
    if walk.is_closed() || (walk.seq().len() > 1 && walk.first() == walk.last()) {
        return Err(Error::NotOpenWalk);
    }
    let seq = walk.seq();
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        let v = seq[i];
        // Jump to the last occurrence of v; the hop (v, seq[j+1]) is an arc
        // because it is consecutive in the original walk.
        let j = (i..seq.len()).rev().find(|&j| seq[j] == v).unwrap();
        out.push(v);
        i = j + 1;
    }
    Path::new(g, out)
}

/// max over vertices of the summed occurrence counts across `walks`.
pub fn overlap<'a, I>(walks: I) -> usize
where
    I: IntoIterator<Item = &'a Walk>,
{
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for w in walks {
        let start = w.seq()[0];
        for (i, &v) in w.seq().iter().enumerate() {
            // Skip the duplicated endpoint of a closed walk.
            if w.is_closed() && i + 1 == w.seq().len() && v == start {
                continue;
            }
            *count.entry(v).or_insert(0) += 1;
        }
    }
    count.values().copied().max().unwrap_or(0)
}

/// max over vertices of the number of sets containing it.
pub fn congestion_of_sets(sets: &[BTreeSet<usize>]) -> usize {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for s in sets {
        for &v in s {
            *count.entry(v).or_insert(0) += 1;
        }
    }
    count.values().copied().max().unwrap_or(0)
}

/// Congestion of a walk family: membership counting over vertex sets, so a
/// walk visiting a vertex three times still contributes one.
pub fn congestion_of_walks<'a, I>(walks: I) -> usize
where
    I: IntoIterator<Item = &'a Walk>,
{
    let sets: Vec<BTreeSet<usize>> = walks.into_iter().map(|w| w.vertex_set()).collect();
    congestion_of_sets(&sets)
}

/// An immutable family of walks with its overlap and congestion computed
/// once at construction.
#[derive(Debug, Clone)]
pub struct WalkFamily {
    walks: Vec<Walk>,
    overlap: usize,
    congestion: usize,
}

impl WalkFamily {
    pub fn new(walks: Vec<Walk>) -> WalkFamily {
        let overlap = overlap(walks.iter());
        let congestion = congestion_of_walks(walks.iter());
        WalkFamily { walks, overlap, congestion }
    }

    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn congestion(&self) -> usize {
        self.congestion
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 0..n-1 fully bidirected clique, handy for arbitrary sequences.
    fn biclique(n: usize) -> Digraph {
        let mut g = Digraph::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    g.add_arc(u, v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn closed_walk_counts_endpoint_once() {
        let g = biclique(4);
        let w = Walk::closed(&g, vec![1, 2, 3, 1]).unwrap();
        assert_eq!(w.occurrences(1), 1);
        assert_eq!(w.occurrences(2), 1);
        assert_eq!(w.occurrences(0), 0);
        assert_eq!(w.length(), 3);

        let open = Walk::open(&g, vec![1, 2, 1, 3]).unwrap();
        assert_eq!(open.occurrences(1), 2);
        assert_eq!(open.length(), 4);
    }

    #[test]
    fn shortcut_excises_leftmost_first() {
        let g = biclique(5);
        let w = Walk::open(&g, vec![1, 2, 1, 2, 3]).unwrap();
        let p = shortcut_to_path(&g, &w).unwrap();
        assert_eq!(p.seq(), &[1, 2, 3]);

        let w = Walk::open(&g, vec![0, 1, 2, 1, 3, 2, 4]).unwrap();
        let p = shortcut_to_path(&g, &w).unwrap();
        // 1 repeats: cut to its last occurrence, then 3, 2, 4 remain distinct.
        assert_eq!(p.seq(), &[0, 1, 3, 2, 4]);

        let w = Walk::closed(&g, vec![1, 2, 1]).unwrap();
        assert_eq!(shortcut_to_path(&g, &w), Err(Error::NotOpenWalk));
    }

    #[test]
    fn overlap_and_congestion_disagree_on_revisits() {
        let g = biclique(4);
        // One walk visiting 0 twice, another visiting 0 once.
        let w1 = Walk::open(&g, vec![0, 1, 0]).unwrap();
        let w2 = Walk::open(&g, vec![2, 0, 3]).unwrap();
        let fam = WalkFamily::new(vec![w1, w2]);
        assert_eq!(fam.overlap(), 3);
        assert_eq!(fam.congestion(), 2);
    }

    #[test]
    fn walk_requires_arcs() {
        let mut g = Digraph::new(3);
        g.add_arc(0, 1).unwrap();
        assert!(Walk::open(&g, vec![0, 1]).is_ok());
        assert_eq!(Walk::open(&g, vec![1, 0]), Err(Error::NotAnArc(1, 0)));
        assert_eq!(Walk::open(&g, vec![]), Err(Error::EmptyWalk));
        assert_eq!(Walk::closed(&g, vec![0, 1]), Err(Error::NotClosed));
    }

    #[test]
    fn path_rejects_repeats() {
        let g = biclique(3);
        assert_eq!(Path::new(&g, vec![0, 1, 0]), Err(Error::RepeatedVertex(0)));
        let p = Path::new(&g, vec![2, 0, 1]).unwrap();
        assert_eq!(p.position_of(0), Some(1));
        assert_eq!(p.position_of(1), Some(2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            /// Random walk in a biclique: any distinct-consecutive sequence.
            fn walk_seq()(len in 1usize..12, seed in any::<u64>()) -> Vec<usize> {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut seq = vec![rng.gen_range(0..6)];
                while seq.len() < len {
                    let last = *seq.last().unwrap();
                    let mut next = rng.gen_range(0..6);
                    if next == last {
                        next = (next + 1) % 6;
                    }
                    seq.push(next);
                }
                seq
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn shortcut_preserves_endpoints_and_support(seq in walk_seq()) {
                let g = biclique(6);
                let w = Walk::open(&g, seq).unwrap();
                if w.seq().len() > 1 && w.first() == w.last() {
                    prop_assert_eq!(shortcut_to_path(&g, &w), Err(Error::NotOpenWalk));
                } else {
                    let p = shortcut_to_path(&g, &w).unwrap();
                    prop_assert_eq!(p.first(), w.first());
                    prop_assert_eq!(p.last(), w.last());
                    let wset = w.vertex_set();
                    prop_assert!(p.vertex_set().is_subset(&wset));
                }
            }

            #[test]
            fn occurrence_positivity_matches_membership(seq in walk_seq()) {
                let g = biclique(6);
                let w = Walk::open(&g, seq).unwrap();
                for v in 0..6 {
                    prop_assert_eq!(w.occurrences(v) >= 1, w.contains_vertex(v));
                }
            }

            #[test]
            fn congestion_never_exceeds_overlap(
                seqs in prop::collection::vec(walk_seq(), 1..5)
            ) {
                let g = biclique(6);
                let walks: Vec<Walk> =
                    seqs.into_iter().map(|s| Walk::open(&g, s).unwrap()).collect();
                let fam = WalkFamily::new(walks);
                prop_assert!(fam.congestion() <= fam.overlap());
                // Cached values equal recomputation.
                prop_assert_eq!(fam.overlap(), overlap(fam.walks().iter()));
                prop_assert_eq!(fam.congestion(), congestion_of_walks(fam.walks().iter()));
            }
        }
    }
}
