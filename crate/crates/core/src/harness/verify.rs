//! Standalone bramble checking. Deliberately does not trust anything the
//! construction side computed: connectivity, touching, and congestion are
//! all rederived from the element sets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::scenarios::Bramble;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BrambleViolation {
    EmptyElement(usize),
    VertexOutOfRange { element: usize, vertex: usize },
    NotStronglyConnected(usize),
    TouchingViolation(usize, usize),
    CongestionMismatch { declared: usize, actual: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct BrambleReport {
    pub violations: Vec<BrambleViolation>,
    pub size: usize,
    pub congestion: usize,
}

impl BrambleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks raw element sets: every element nonempty, in range, and strongly
/// connected; every pair sharing a vertex or joined by arcs both ways.
/// Congestion in the report is the recomputed value.
pub fn verify_elements(g: &Digraph, elements: &[BTreeSet<usize>]) -> BrambleReport {
    let mut violations = Vec::new();
    let mut usable = vec![true; elements.len()];
    for (i, el) in elements.iter().enumerate() {
        if el.is_empty() {
            violations.push(BrambleViolation::EmptyElement(i));
            usable[i] = false;
            continue;
        }
        if let Some(&v) = el.iter().find(|&&v| v >= g.n()) {
            violations.push(BrambleViolation::VertexOutOfRange { element: i, vertex: v });
            usable[i] = false;
            continue;
        }
        if !g.is_strongly_connected(el).unwrap_or(false) {
            violations.push(BrambleViolation::NotStronglyConnected(i));
        }
    }
    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            if usable[i] && usable[j] && !touch(g, &elements[i], &elements[j]) {
                violations.push(BrambleViolation::TouchingViolation(i, j));
            }
        }
    }
    let mut load = vec![0usize; g.n()];
    for el in elements {
        for &v in el.iter().filter(|&&v| v < g.n()) {
            load[v] += 1;
        }
    }
    BrambleReport {
        violations,
        size: elements.len(),
        congestion: load.iter().copied().max().unwrap_or(0),
    }
}

/// [`verify_elements`] plus a cross-check of the congestion the bramble
/// carries against the recomputed one.
pub fn verify_bramble(g: &Digraph, b: &Bramble) -> BrambleReport {
    let mut report = verify_elements(g, b.elements());
    if report.congestion != b.congestion() {
        report.violations.push(BrambleViolation::CongestionMismatch {
            declared: b.congestion(),
            actual: report.congestion,
        });
    }
    report
}

fn touch(g: &Digraph, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> bool {
    if x.intersection(y).next().is_some() {
        return true;
    }
    let out_hits = |from: &BTreeSet<usize>, to: &BTreeSet<usize>| {
        from.iter().any(|&u| g.out_neighbors(u).iter().any(|v| to.contains(v)))
    };
    out_hits(x, y) && out_hits(y, x)
}

/// Second opinion, written against the definitions rather than the graph
/// API: reachability by Floyd-Warshall on the induced subgraph, touching by
/// exhaustive vertex-pair scans. Used to cross-examine [`verify_elements`].
pub fn naive_accepts(g: &Digraph, elements: &[BTreeSet<usize>]) -> bool {
    for el in elements {
        if el.is_empty() || el.iter().any(|&v| v >= g.n()) {
            return false;
        }
        let verts: Vec<usize> = el.iter().copied().collect();
        let m = verts.len();
        let mut reach = vec![vec![false; m]; m];
        for (p, &u) in verts.iter().enumerate() {
            reach[p][p] = true;
            for (q, &v) in verts.iter().enumerate() {
                if g.has_arc(u, v) {
                    reach[p][q] = true;
                }
            }
        }
        for mid in 0..m {
            for p in 0..m {
                for q in 0..m {
                    if reach[p][mid] && reach[mid][q] {
                        reach[p][q] = true;
                    }
                }
            }
        }
        if reach.iter().any(|row| row.iter().any(|&r| !r)) {
            return false;
        }
    }
    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            let (x, y) = (&elements[i], &elements[j]);
            let shared = x.iter().any(|v| y.contains(v));
            let fwd = x.iter().any(|&u| y.iter().any(|&v| g.has_arc(u, v)));
            let back = y.iter().any(|&u| x.iter().any(|&v| g.has_arc(u, v)));
            if !(shared || (fwd && back)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bidirected_triangle() -> Digraph {
        let mut g = Digraph::new(3);
        for (u, v) in [(0, 1), (1, 2), (2, 0)] {
            g.add_arc(u, v).unwrap();
            g.add_arc(v, u).unwrap();
        }
        g
    }

    fn set(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().copied().collect()
    }

    #[test]
    fn triangle_singletons_are_a_valid_bramble() {
        let g = bidirected_triangle();
        let report = verify_elements(&g, &[set(&[0]), set(&[1]), set(&[2])]);
        assert!(report.is_valid());
        assert_eq!(report.size, 3);
        assert_eq!(report.congestion, 1);
    }

    #[test]
    fn one_way_arc_is_not_touching() {
        let mut g = Digraph::new(2);
        g.add_arc(0, 1).unwrap();
        let report = verify_elements(&g, &[set(&[0]), set(&[1])]);
        assert_eq!(report.violations, vec![BrambleViolation::TouchingViolation(0, 1)]);
    }

    #[test]
    fn weakly_connected_element_is_flagged() {
        let mut g = Digraph::new(3);
        g.add_arc(0, 1).unwrap();
        g.add_arc(1, 2).unwrap();
        let report = verify_elements(&g, &[set(&[0, 1, 2])]);
        assert_eq!(report.violations, vec![BrambleViolation::NotStronglyConnected(0)]);
    }

    #[test]
    fn out_of_range_and_empty_elements_are_flagged_without_panicking() {
        let g = bidirected_triangle();
        let report = verify_elements(&g, &[set(&[]), set(&[7]), set(&[1])]);
        assert!(report.violations.contains(&BrambleViolation::EmptyElement(0)));
        assert!(report
            .violations
            .contains(&BrambleViolation::VertexOutOfRange { element: 1, vertex: 7 }));
    }

    #[test]
    fn verifier_and_naive_checker_agree_on_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut accepted = 0usize;
        let mut rejected = 0usize;
        for case in 0..100 {
            let n = rng.gen_range(3..=8);
            let mut g = Digraph::new(n);
            let clique = case % 2 == 0;
            for u in 0..n {
                for v in 0..n {
                    if u != v && (clique || rng.gen_bool(0.3)) {
                        g.add_arc(u, v).unwrap();
                    }
                }
            }
            let elements: Vec<BTreeSet<usize>> = (0..rng.gen_range(2..=4))
                .map(|_| {
                    let sz = rng.gen_range(1..=3);
                    (0..sz).map(|_| rng.gen_range(0..n)).collect()
                })
                .collect();
            let verdict = verify_elements(&g, &elements).is_valid();
            assert_eq!(verdict, naive_accepts(&g, &elements), "case {case} disagrees");
            if verdict {
                accepted += 1;
            } else {
                rejected += 1;
            }
        }
        assert!(accepted >= 10, "want both outcomes exercised, got {accepted} accepts");
        assert!(rejected >= 10, "want both outcomes exercised, got {rejected} rejects");
    }
}
