//! Bramble order: the minimum number of vertices needed to hit every
//! element. Exact answers come from branch and bound over element-wise
//! vertex choices; past the cap only greedy bounds are reported.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::scenarios::Bramble;

#[derive(Debug, Clone, Serialize)]
pub struct OrderBounds {
    /// Minimum hitting set size, absent when the element count exceeds the
    /// cap handed to [`bramble_order`].
    pub exact: Option<usize>,
    /// Greedy cover size.
    pub upper: usize,
    /// Size of a greedily packed family of pairwise disjoint elements.
    pub lower: usize,
}

pub fn bramble_order(g: &Digraph, b: &Bramble, cap: usize) -> OrderBounds {
    order_of_sets(g.n(), b.elements(), cap)
}

/// Same computation on bare sets. Elements must be nonempty.
pub fn order_of_sets(n: usize, elements: &[BTreeSet<usize>], cap: usize) -> OrderBounds {
    assert!(elements.iter().all(|el| !el.is_empty()), "cannot hit an empty element");
    let lower = packing_lower(elements, &BTreeSet::new());
    let upper = greedy_upper(n, elements);
    let exact = if elements.len() <= cap {
        let mut best = upper;
        let mut chosen = BTreeSet::new();
        branch(elements, &mut chosen, &mut best);
        Some(best)
    } else {
        None
    };
    OrderBounds { exact, upper, lower }
}

fn packing_lower(elements: &[BTreeSet<usize>], hit_by: &BTreeSet<usize>) -> usize {
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut count = 0;
    for el in elements {
        if el.iter().any(|v| hit_by.contains(v)) {
            continue;
        }
        if el.iter().all(|v| !used.contains(v)) {
            count += 1;
            used.extend(el.iter().copied());
        }
    }
    count
}

fn greedy_upper(n: usize, elements: &[BTreeSet<usize>]) -> usize {
    let mut covered = vec![false; elements.len()];
    let mut picks = 0;
    while covered.iter().any(|&c| !c) {
        let mut gain = vec![0usize; n];
        for (el, &done) in elements.iter().zip(&covered) {
            if !done {
                for &v in el {
                    gain[v] += 1;
                }
            }
        }
        let v = (0..n).max_by_key(|&v| (gain[v], std::cmp::Reverse(v))).expect("n > 0");
        picks += 1;
        for (el, done) in elements.iter().zip(covered.iter_mut()) {
            if el.contains(&v) {
                *done = true;
            }
        }
    }
    picks
}

fn branch(elements: &[BTreeSet<usize>], chosen: &mut BTreeSet<usize>, best: &mut usize) {
    if chosen.len() >= *best {
        return;
    }
    let open = elements
        .iter()
        .filter(|el| el.iter().all(|v| !chosen.contains(v)))
        .min_by_key(|el| el.len());
    let Some(target) = open else {
        *best = chosen.len();
        return;
    };
    if chosen.len() + packing_lower(elements, chosen) >= *best {
        return;
    }
    for &v in target.clone().iter() {
        chosen.insert(v);
        branch(elements, chosen, best);
        chosen.remove(&v);
    }
}

/// Bitmask enumeration over the element union; answers are exact but the
/// union must stay within 20 vertices. Exists to cross-examine
/// [`order_of_sets`].
pub fn exhaustive_min_hitting_set(elements: &[BTreeSet<usize>]) -> Option<usize> {
    let universe: Vec<usize> = elements
        .iter()
        .flat_map(|el| el.iter().copied())
        .collect::<BTreeSet<usize>>()
        .into_iter()
        .collect();
    if universe.len() > 20 {
        return None;
    }
    let slot = |v: usize| universe.binary_search(&v).expect("vertex from the union");
    let masks: Vec<u32> = elements
        .iter()
        .map(|el| el.iter().fold(0u32, |m, &v| m | 1 << slot(v)))
        .collect();
    if masks.iter().any(|&m| m == 0) {
        return None;
    }
    let mut best = u32::MAX;
    for pick in 0..(1u32 << universe.len()) {
        if pick.count_ones() < best && masks.iter().all(|&m| m & pick != 0) {
            best = pick.count_ones();
        }
    }
    Some(best as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().copied().collect()
    }

    #[test]
    fn disjoint_singletons_need_one_vertex_each() {
        let b = order_of_sets(4, &[set(&[1]), set(&[2]), set(&[3])], 10);
        assert_eq!(b.exact, Some(3));
        assert_eq!(b.lower, 3);
        assert_eq!(b.upper, 3);
    }

    #[test]
    fn shared_vertex_collapses_the_order() {
        let b = order_of_sets(4, &[set(&[1, 2]), set(&[2, 3])], 10);
        assert_eq!(b.exact, Some(1));
    }

    #[test]
    fn cap_suppresses_the_exact_answer_but_not_the_bounds() {
        let els = [set(&[0]), set(&[1]), set(&[2])];
        let b = order_of_sets(3, &els, 2);
        assert_eq!(b.exact, None);
        assert!(b.lower <= b.upper);
        assert_eq!(b.lower, 3);
    }

    #[test]
    fn branch_and_bound_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let n = rng.gen_range(4..=12);
            let elements: Vec<BTreeSet<usize>> = (0..rng.gen_range(2..=7))
                .map(|_| {
                    let sz = rng.gen_range(1..=4);
                    (0..sz).map(|_| rng.gen_range(0..n)).collect()
                })
                .collect();
            let b = order_of_sets(n, &elements, 10);
            assert_eq!(b.exact, exhaustive_min_hitting_set(&elements));
            let e = b.exact.unwrap();
            assert!(b.lower <= e && e <= b.upper);
        }
    }
}
