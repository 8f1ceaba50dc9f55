//! Clique minor search: randomized greedy edge contraction with restarts,
//! plus an exhaustive branch-set search on tiny graphs so small instances
//! get an exact answer.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{validate_branch_decomposition, BranchDecomposition, UGraph};

/// Looks for `target` disjoint connected branch sets that pairwise touch by
/// an edge. Greedy contraction runs `restarts` times with jittered
/// tie-breaking; when every attempt fails and the graph has at most 10
/// vertices an exhaustive search decides the question exactly.
pub fn find_clique_minor(
    g: &UGraph,
    target: usize,
    seed: u64,
    restarts: usize,
) -> Option<BranchDecomposition> {
    if target == 0 {
        return Some(Vec::new());
    }
    if target == 1 {
        return if g.n() > 0 {
            Some(vec![[0].into_iter().collect()])
        } else {
            None
        };
    }
    if g.n() < target {
        return None;
    }
    for round in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(round as u64));
        if let Some(sets) = greedy_attempt(g, target, &mut rng) {
            validate_branch_decomposition(g, &sets).expect("greedy minor must validate");
            return Some(sets);
        }
    }
    if g.n() <= 10 {
        let found = exhaustive_minor(g, target);
        if let Some(sets) = &found {
            validate_branch_decomposition(g, sets).expect("exhaustive minor must validate");
        }
        return found;
    }
    None
}

/// One greedy pass: repeatedly contract the quotient edge whose endpoints
/// share the most neighbors, checking for a K_target clique in the quotient
/// after every step.
fn greedy_attempt(g: &UGraph, target: usize, rng: &mut ChaCha8Rng) -> Option<BranchDecomposition> {
    // Quotient state: alive branch ids, their vertex sets, adjacency sets.
    let n = g.n();
    let mut sets: Vec<BTreeSet<usize>> = (0..n).map(|v| [v].into_iter().collect()).collect();
    let mut nbr: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();

    loop {
        if let Some(ids) = quotient_clique(&alive, &nbr, target) {
            return Some(ids.into_iter().map(|i| sets[i].clone()).collect());
        }
        if alive.len() <= target {
            return None;
        }
        // Pick the contraction. Shuffle candidate order so restarts explore
        // different tie classes.
        let mut edges: Vec<(usize, usize)> = alive
            .iter()
            .flat_map(|&u| nbr[u].iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
            .collect();
        if edges.is_empty() {
            return None;
        }
        edges.shuffle(rng);
        let &(u, v) = edges
            .iter()
            .max_by_key(|&&(u, v)| nbr[u].intersection(&nbr[v]).count())
            .unwrap();
        // Absorb the endpoint with fewer private neighbors into the other.
        let priv_u = nbr[u].difference(&nbr[v]).filter(|&&w| w != v).count();
        let priv_v = nbr[v].difference(&nbr[u]).filter(|&&w| w != u).count();
        let (keep, gone) = if priv_v <= priv_u { (u, v) } else { (v, u) };
        alive.remove(&gone);
        let moved = std::mem::take(&mut sets[gone]);
        sets[keep].extend(moved);
        let gone_nbrs = std::mem::take(&mut nbr[gone]);
        for w in gone_nbrs {
            nbr[w].remove(&gone);
            if w != keep {
                nbr[w].insert(keep);
                nbr[keep].insert(w);
            }
        }
        nbr[keep].remove(&gone);
        nbr[keep].remove(&keep);
    }
}

/// Clique of the requested size in the quotient graph: greedy first, exact
/// branch-and-bound when the quotient is small enough to afford it.
fn quotient_clique(
    alive: &BTreeSet<usize>,
    nbr: &[BTreeSet<usize>],
    target: usize,
) -> Option<Vec<usize>> {
    // Greedy: seed on each vertex by descending degree, extend compatibly.
    let mut order: Vec<usize> = alive.iter().copied().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(nbr[v].len()));
    for &start in &order {
        let mut clique = vec![start];
        for &v in &order {
            if clique.len() == target {
                break;
            }
            if v != start && clique.iter().all(|&c| nbr[c].contains(&v)) {
                clique.push(v);
            }
        }
        if clique.len() >= target {
            clique.truncate(target);
            return Some(clique);
        }
    }
    if alive.len() <= 24 {
        let mut clique = Vec::new();
        let cands: Vec<usize> = order.clone();
        if exact_clique(&cands, nbr, target, &mut clique) {
            return Some(clique);
        }
    }
    None
}

fn exact_clique(
    cands: &[usize],
    nbr: &[BTreeSet<usize>],
    target: usize,
    clique: &mut Vec<usize>,
) -> bool {
    if clique.len() == target {
        return true;
    }
    if clique.len() + cands.len() < target {
        return false;
    }
    for (i, &v) in cands.iter().enumerate() {
        clique.push(v);
        let rest: Vec<usize> = cands[i + 1..]
            .iter()
            .copied()
            .filter(|&w| nbr[v].contains(&w))
            .collect();
        if exact_clique(&rest, nbr, target, clique) {
            return true;
        }
        clique.pop();
    }
    false
}

/// Exhaustive search over tuples of disjoint connected subsets, ascending
/// by bitmask so the answer is deterministic.
fn exhaustive_minor(g: &UGraph, target: usize) -> Option<BranchDecomposition> {
    let n = g.n();
    let mut connected: Vec<u32> = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if g.is_connected_subset(&set) {
            connected.push(mask);
        }
    }
    let touch = |a: u32, b: u32| -> bool {
        (0..n).any(|u| {
            a & (1 << u) != 0
                && g.neighbors(u).iter().any(|&w| b & (1 << w) != 0)
        })
    };
    let mut chosen: Vec<u32> = Vec::new();
    fn dfs(
        connected: &[u32],
        from: usize,
        target: usize,
        chosen: &mut Vec<u32>,
        touch: &dyn Fn(u32, u32) -> bool,
    ) -> bool {
        if chosen.len() == target {
            return true;
        }
        for i in from..connected.len() {
            let c = connected[i];
            if chosen.iter().any(|&p| p & c != 0) {
                continue;
            }
            if !chosen.iter().all(|&p| touch(p, c)) {
                continue;
            }
            chosen.push(c);
            if dfs(connected, i + 1, target, chosen, touch) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    if dfs(&connected, 0, target, &mut chosen, &touch) {
        Some(
            chosen
                .into_iter()
                .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
                .collect(),
        )
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::complete_graph;
    use super::*;

    fn cycle_graph(n: usize) -> UGraph {
        let mut g = UGraph::new(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n).unwrap();
        }
        g
    }

    #[test]
    fn complete_graph_yields_singleton_branch_sets() {
        let g = complete_graph(4);
        let sets = find_clique_minor(&g, 4, 7, 4).unwrap();
        assert_eq!(sets.len(), 4);
        assert!(sets.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn five_cycle_has_k3_minor_but_not_k4() {
        let g = cycle_graph(5);
        let sets = find_clique_minor(&g, 3, 11, 8).unwrap();
        assert_eq!(sets.len(), 3);
        validate_branch_decomposition(&g, &sets).unwrap();
        // C_5 is planar and triangle-free of max degree 2; contracting can
        // never reach K_4.
        assert!(find_clique_minor(&g, 4, 11, 8).is_none());
    }

    #[test]
    fn petersen_graph_contracts_to_k5() {
        // Outer 5-cycle 0..4, inner pentagram 5..9, spokes i -> i+5.
        let mut g = UGraph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5).unwrap();
            g.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
            g.add_edge(i, i + 5).unwrap();
        }
        let sets = find_clique_minor(&g, 5, 23, 16).unwrap();
        assert_eq!(sets.len(), 5);
        validate_branch_decomposition(&g, &sets).unwrap();
    }

    #[test]
    fn k33_stops_at_k4() {
        let mut g = UGraph::new(6);
        for a in 0..3 {
            for b in 3..6 {
                g.add_edge(a, b).unwrap();
            }
        }
        let sets = find_clique_minor(&g, 4, 5, 8).unwrap();
        assert_eq!(sets.len(), 4);
        validate_branch_decomposition(&g, &sets).unwrap();
        // A K_5 minor needs ten pairwise joining edges and K_{3,3} only has
        // nine, so the exhaustive fallback must report absence.
        assert!(find_clique_minor(&g, 5, 5, 8).is_none());
    }

    #[test]
    fn greedy_never_beats_exhaustive_and_exhaustive_is_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..60 {
            let n = rng.gen_range(2..=7);
            let mut g = UGraph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            for target in 2..=n {
                let exact = exhaustive_minor(&g, target);
                if let Some(sets) = &exact {
                    validate_branch_decomposition(&g, sets).unwrap();
                }
                let combined = find_clique_minor(&g, target, trial as u64, 6);
                // find_clique_minor falls back to the exhaustive search on
                // these sizes, so the two must agree on existence.
                assert_eq!(combined.is_some(), exact.is_some());
            }
        }
    }
}
