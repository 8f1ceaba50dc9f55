//! Crossing two threaded linkages: when their bipartite intersection graph
//! is dense enough, d closed walks exist that each contain a complete path
//! of both linkages, with congestion controlled by untangledness.

use std::collections::BTreeSet;

use crate::combinatorics::{
    extract_min_degree_core, intersection_graph_bipartite, partition_bipartite,
};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::threading::{AnchoredWalkFamily, ThreadedLinkage};
use crate::walk::Walk;

/// Standard density threshold: the bipartite intersection graph must not
/// be (2^9 * 5 * d)-degenerate.
pub fn bowtie(
    g: &Digraph,
    tl1: &ThreadedLinkage,
    tl2: &ThreadedLinkage,
    d: usize,
) -> Result<AnchoredWalkFamily> {
    bowtie_with_threshold(g, tl1, tl2, d, (1usize << 9) * 5 * d)
}

/// Same construction with the degeneracy threshold as a parameter, so
/// callers holding sharper density evidence can pass exactly what they
/// know. The walks anchor their first-linkage path under label 0 and their
/// second-linkage path under label 1.
pub fn bowtie_with_threshold(
    g: &Digraph,
    tl1: &ThreadedLinkage,
    tl2: &ThreadedLinkage,
    d: usize,
    threshold: usize,
) -> Result<AnchoredWalkFamily> {
    if d == 0 {
        return Err(Error::Internal("requested walk count must be positive".into()));
    }
    let left_sets: Vec<BTreeSet<usize>> = tl1
        .linkage()
        .paths()
        .iter()
        .map(|p| p.vertex_set())
        .collect();
    let right_sets: Vec<BTreeSet<usize>> = tl2
        .linkage()
        .paths()
        .iter()
        .map(|p| p.vertex_set())
        .collect();
    let nl = left_sets.len();
    let big = intersection_graph_bipartite(&left_sets, &right_sets);
    // Not t-degenerate means some subgraph has minimum degree t+1, and
    // peeling finds the maximal such subgraph.
    let core = extract_min_degree_core(&big, threshold + 1);
    if core.is_empty() {
        return Err(Error::TooSparse(threshold));
    }
    let (cg, map) = big.induced(&core);
    // Sides in appearance order along the two walks; linkage path order is
    // span order already, and induced() keeps ids ascending.
    let x_order: Vec<usize> = (0..cg.n()).filter(|&v| map[v] < nl).collect();
    let y_order: Vec<usize> = (0..cg.n()).filter(|&v| map[v] >= nl).collect();
    let pairs = partition_bipartite(&cg, &x_order, &y_order, d, 5)?;

    let mut walks = Vec::with_capacity(d);
    let mut anchors = Vec::with_capacity(d);
    for pair in &pairs {
        let li: Vec<usize> = pair.x.iter().map(|&v| map[v]).collect();
        let ri: Vec<usize> = pair.y.iter().map(|&v| map[v] - nl).collect();
        let pl: Vec<BTreeSet<usize>> = li.iter().map(|&t| left_sets[t].clone()).collect();
        let pr: Vec<BTreeSet<usize>> = ri.iter().map(|&t| right_sets[t].clone()).collect();
        let pg = intersection_graph_bipartite(&pl, &pr);
        let core3 = extract_min_degree_core(&pg, 3);
        if core3.is_empty() {
            return Err(Error::ConstructionGap(
                "an average-degree-5 part lost its entire minimum-degree-3 core".into(),
            ));
        }
        // Surviving linkage indices, still in walk order.
        let keep_l: Vec<usize> = core3
            .iter()
            .filter(|&&v| v < pl.len())
            .map(|&v| li[v])
            .collect();
        let keep_r: Vec<usize> = core3
            .iter()
            .filter(|&&v| v >= pl.len())
            .map(|&v| ri[v - pl.len()])
            .collect();
        let z = keep_l.len();
        let zp = keep_r.len();
        if z < 3 || zp < 3 {
            return Err(Error::ConstructionGap(format!(
                "degree-3 core keeps only {z} and {zp} paths"
            )));
        }
        // v: earliest second-linkage path (index at most z'-3) meeting the
        // last first-linkage path, smallest shared vertex. w: symmetric.
        let last_l = &left_sets[keep_l[z - 1]];
        let mut v_pick = None;
        for q in 0..=(zp - 3) {
            if let Some(&v) = last_l.intersection(&right_sets[keep_r[q]]).next() {
                v_pick = Some((q, v));
                break;
            }
        }
        let last_r = &right_sets[keep_r[zp - 1]];
        let mut w_pick = None;
        for q in 0..=(z - 3) {
            if let Some(&w) = last_r.intersection(&left_sets[keep_l[q]]).next() {
                w_pick = Some((q, w));
                break;
            }
        }
        let (Some((q2, v)), Some((q1, w))) = (v_pick, w_pick) else {
            return Err(Error::ConstructionGap(
                "no early crossing despite minimum degree 3".into(),
            ));
        };
        let pos_in = |tl: &ThreadedLinkage, idx: usize, u: usize| -> usize {
            tl.spans()[idx].0
                + tl.linkage().paths()[idx]
                    .position_of(u)
                    .expect("crossing vertex lies on the path")
        };
        // Ride the second walk from v (on P'_{q'}) to w (on P'_{z'}), then
        // the first walk from w (on P_q) back to v (on P_z).
        let pv2 = pos_in(tl2, keep_r[q2], v);
        let pw2 = pos_in(tl2, keep_r[zp - 1], w);
        let pw1 = pos_in(tl1, keep_l[q1], w);
        let pv1 = pos_in(tl1, keep_l[z - 1], v);
        let mut zseq = tl2.walk().seq()[pv2..=pw2].to_vec();
        zseq.extend_from_slice(&tl1.walk().seq()[pw1 + 1..=pv1]);
        walks.push(Walk::closed(g, zseq)?);
        anchors.push(vec![
            (0usize, tl1.linkage().paths()[keep_l[q1 + 1]].clone()),
            (1usize, tl2.linkage().paths()[keep_r[q2 + 1]].clone()),
        ]);
    }

    let fam = AnchoredWalkFamily::new(walks, anchors)?;
    let alpha = tl1.overlap();
    let beta = tl2.overlap();
    let mut bound = alpha + beta;
    if tl1.is_untangled() && tl2.is_untangled() {
        bound = bound.min(2);
    } else if tl1.is_untangled() {
        bound = bound.min(beta + 1);
    } else if tl2.is_untangled() {
        bound = bound.min(alpha + 1);
    }
    if fam.congestion() > bound {
        return Err(Error::Internal(format!(
            "crossing family congestion {} exceeds the {bound} bound",
            fam.congestion()
        )));
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{gen_bidirected_grid, snake_columns, snake_rows};

    #[test]
    fn both_untangled_snakes_cross_with_congestion_two() {
        let g = gen_bidirected_grid(10, 12).unwrap();
        let cols = snake_columns(&g, 10, 12, false).unwrap();
        let rows = snake_rows(&g, 10, 12, false).unwrap();
        assert!(cols.is_untangled() && rows.is_untangled());
        let fam = bowtie_with_threshold(&g, &cols, &rows, 2, 2).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(fam.congestion() <= 2);
        for anc in fam.anchors() {
            let labels: Vec<usize> = anc.iter().map(|(l, _)| *l).collect();
            assert_eq!(labels, vec![0, 1]);
        }
    }

    #[test]
    fn tangled_side_raises_the_bound_to_beta_plus_one() {
        let g = gen_bidirected_grid(10, 12).unwrap();
        let cols = snake_columns(&g, 10, 12, false).unwrap();
        let rows = snake_rows(&g, 10, 12, true).unwrap();
        assert!(cols.is_untangled());
        assert!(!rows.is_untangled());
        assert_eq!(rows.overlap(), 3);
        let fam = bowtie_with_threshold(&g, &cols, &rows, 2, 2).unwrap();
        assert!(fam.congestion() <= 4);
    }

    #[test]
    fn both_tangled_stay_within_alpha_plus_beta() {
        let g = gen_bidirected_grid(10, 12).unwrap();
        let cols = snake_columns(&g, 10, 12, true).unwrap();
        let rows = snake_rows(&g, 10, 12, true).unwrap();
        assert!(!cols.is_untangled() && !rows.is_untangled());
        let fam = bowtie_with_threshold(&g, &cols, &rows, 2, 2).unwrap();
        assert!(fam.congestion() <= cols.overlap() + rows.overlap());
    }

    #[test]
    fn single_walk_contains_one_full_path_of_each_linkage() {
        let g = gen_bidirected_grid(6, 6).unwrap();
        let cols = snake_columns(&g, 6, 6, false).unwrap();
        let rows = snake_rows(&g, 6, 6, false).unwrap();
        let fam = bowtie_with_threshold(&g, &cols, &rows, 1, 2).unwrap();
        assert_eq!(fam.len(), 1);
        let walk = &fam.walks()[0];
        assert!(walk.is_closed());
        for (label, path) in &fam.anchors()[0] {
            assert!(walk.contains_contiguous(path.seq()), "label {label} anchor missing");
        }
        assert!(fam.congestion() <= 2);
    }

    #[test]
    fn sparse_instance_reports_too_sparse_at_default_threshold() {
        let g = gen_bidirected_grid(10, 12).unwrap();
        let cols = snake_columns(&g, 10, 12, false).unwrap();
        let rows = snake_rows(&g, 10, 12, false).unwrap();
        // Default threshold for d = 2 is 5120; every intersection degree
        // here is at most 12.
        assert!(matches!(
            bowtie(&g, &cols, &rows, 2),
            Err(Error::TooSparse(5120))
        ));
    }
}
