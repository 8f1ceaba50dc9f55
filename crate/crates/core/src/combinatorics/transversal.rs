//! Independent transversals: pick one vertex per class so that no two picks
//! are adjacent. Randomized local resampling does the heavy lifting;
//! exhaustive search settles small instances exactly.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::UGraph;

pub const DEFAULT_TRANSVERSAL_BUDGET: usize = 20_000;

/// Returns one vertex per class with no edge between any two picks, `None`
/// when exhaustive search has proven no transversal exists, or
/// `Err(BudgetExhausted)` when resampling gave up on an instance too large
/// to settle exhaustively.
pub fn independent_transversal(
    g: &UGraph,
    classes: &[Vec<usize>],
    seed: u64,
    budget: usize,
) -> Result<Option<Vec<usize>>> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (i, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(Error::Internal(format!("transversal class {i} is empty")));
        }
        for &v in class {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange(v, g.n()));
            }
            if !seen.insert(v) {
                return Err(Error::Internal(format!(
                    "transversal classes overlap at {v}"
                )));
            }
        }
        for (k, &u) in class.iter().enumerate() {
            for &v in &class[k + 1..] {
                if g.has_edge(u, v) {
                    return Err(Error::Internal(format!(
                        "class {i} is not independent: {u} ~ {v}"
                    )));
                }
            }
        }
    }
    if classes.is_empty() {
        return Ok(Some(Vec::new()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut choice: Vec<usize> = classes
        .iter()
        .map(|c| c[rng.gen_range(0..c.len())])
        .collect();
    for _ in 0..budget {
        match first_conflict(g, &choice) {
            None => return Ok(Some(choice)),
            Some((i, j)) => {
                choice[i] = classes[i][rng.gen_range(0..classes[i].len())];
                choice[j] = classes[j][rng.gen_range(0..classes[j].len())];
            }
        }
    }

    let mut product: usize = 1;
    for c in classes {
        product = product.saturating_mul(c.len());
        if product > 1_000_000 {
            return Err(Error::BudgetExhausted(budget));
        }
    }
    let mut partial = Vec::with_capacity(classes.len());
    if exhaustive(g, classes, &mut partial) {
        Ok(Some(partial))
    } else {
        Ok(None)
    }
}

fn first_conflict(g: &UGraph, choice: &[usize]) -> Option<(usize, usize)> {
    for i in 0..choice.len() {
        for j in (i + 1)..choice.len() {
            if g.has_edge(choice[i], choice[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn exhaustive(g: &UGraph, classes: &[Vec<usize>], partial: &mut Vec<usize>) -> bool {
    if partial.len() == classes.len() {
        return true;
    }
    for &v in &classes[partial.len()] {
        if partial.iter().all(|&u| !g.has_edge(u, v)) {
            partial.push(v);
            if exhaustive(g, classes, partial) {
                return true;
            }
            partial.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_transversal_when_classes_are_loose() {
        // Two classes joined by a single edge; the other pairs are free.
        let mut g = UGraph::new(4);
        g.add_edge(0, 2).unwrap();
        let classes = vec![vec![0, 1], vec![2, 3]];
        let t = independent_transversal(&g, &classes, 3, 500).unwrap().unwrap();
        assert!(!g.has_edge(t[0], t[1]));
    }

    #[test]
    fn proves_absence_on_complete_bipartite_conflict() {
        // Every choice from {0,1} is adjacent to every choice from {2,3}.
        let mut g = UGraph::new(4);
        for u in 0..2 {
            for v in 2..4 {
                g.add_edge(u, v).unwrap();
            }
        }
        let classes = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(independent_transversal(&g, &classes, 3, 200).unwrap(), None);
    }

    #[test]
    fn respects_class_preconditions() {
        let mut g = UGraph::new(3);
        g.add_edge(0, 1).unwrap();
        // Non-independent class.
        assert!(independent_transversal(&g, &[vec![0, 1]], 0, 10).is_err());
        // Overlapping classes.
        assert!(independent_transversal(&g, &[vec![0], vec![0]], 0, 10).is_err());
        // Empty class.
        assert!(independent_transversal(&g, &[vec![]], 0, 10).is_err());
    }

    #[test]
    fn matches_exhaustive_verdict_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..80 {
            let k = rng.gen_range(1..=4usize);
            let size = rng.gen_range(1..=3usize);
            let n = k * size;
            let mut g = UGraph::new(n);
            let classes: Vec<Vec<usize>> =
                (0..k).map(|i| (i * size..(i + 1) * size).collect()).collect();
            for u in 0..n {
                for v in (u + 1)..n {
                    // Only cross-class edges keep classes independent.
                    if u / size != v / size && rng.gen_bool(0.4) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let mut partial = Vec::new();
            let oracle = exhaustive(&g, &classes, &mut partial);
            let got = independent_transversal(&g, &classes, trial, 2_000).unwrap();
            assert_eq!(got.is_some(), oracle);
            if let Some(t) = got {
                assert!(first_conflict(&g, &t).is_none());
                for (i, &v) in t.iter().enumerate() {
                    assert!(classes[i].contains(&v));
                }
            }
        }
    }
}
