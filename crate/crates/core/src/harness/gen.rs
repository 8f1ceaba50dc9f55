//! Instance generators: grids, serpentine threaded linkages over grids,
//! grid path systems, and the private-lane systems used to steer the
//! pipeline into a chosen case.

use std::collections::BTreeSet;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linkage::{validate_path_system, Linkage, PathSystem, DEFAULT_WELL_LINKED_BOUND};
use crate::threading::ThreadedLinkage;
use crate::walk::{Path, Walk};

/// rows x cols grid with every orthogonal adjacency present in both
/// directions. Vertex (r, c) has id r * cols + c.
pub fn gen_bidirected_grid(rows: usize, cols: usize) -> Result<Digraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::HypothesisUnmet("grid needs positive dimensions".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut g = Digraph::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_arc(id(r, c), id(r, c + 1))?;
                g.add_arc(id(r, c + 1), id(r, c))?;
            }
            if r + 1 < rows {
                g.add_arc(id(r, c), id(r + 1, c))?;
                g.add_arc(id(r + 1, c), id(r, c))?;
            }
        }
    }
    Ok(g)
}

/// Cylindrical grid on 2g^2 vertices: g concentric cycles of length 2g, all
/// oriented the same way, joined by 2g radial paths of alternating
/// direction. Vertex (ring r, position p) has id r * 2g + p.
pub fn gen_cylindrical_grid(g: usize) -> Result<Digraph> {
    if g < 2 {
        return Err(Error::HypothesisUnmet(format!("cylindrical grid needs g >= 2, got {g}")));
    }
    let m = 2 * g;
    let id = |r: usize, p: usize| r * m + p;
    let mut dg = Digraph::new(g * m);
    for r in 0..g {
        for p in 0..m {
            dg.add_arc(id(r, p), id(r, (p + 1) % m))?;
        }
    }
    for p in 0..m {
        for r in 0..g - 1 {
            if p % 2 == 0 {
                dg.add_arc(id(r, p), id(r + 1, p))?;
            } else {
                dg.add_arc(id(r + 1, p), id(r, p))?;
            }
        }
    }
    let all: BTreeSet<usize> = (0..dg.n()).collect();
    if !dg.is_strongly_connected(&all)? {
        return Err(Error::Internal("cylindrical grid is not strongly connected".into()));
    }
    Ok(dg)
}

/// Path system on a bidirected g x g grid: hosts are full rows spread
/// evenly from top to bottom (clustering them lets the marks of one host
/// seal off a corner of its neighbour once they are removed), A_i the
/// first b columns, B_i the last b. Well-linkedness of the marked union is
/// checked exhaustively when it has at most 12 vertices and asserted by
/// construction otherwise.
pub fn gen_grid_path_system(g: usize, a: usize, b: usize) -> Result<(Digraph, PathSystem)> {
    gen_rect_path_system(g, g, a, b)
}

/// Rectangular variant of [`gen_grid_path_system`]: hosts are full rows of
/// a bidirected rows x cols grid, marks sit on the first and last b
/// columns. Same validation policy.
pub fn gen_rect_path_system(
    rows: usize,
    cols: usize,
    a: usize,
    b: usize,
) -> Result<(Digraph, PathSystem)> {
    if a == 0 || b == 0 {
        return Err(Error::HypothesisUnmet("need at least one path and one mark".into()));
    }
    if a > rows || 2 * b > cols {
        return Err(Error::HypothesisUnmet(format!(
            "a {rows}x{cols} grid cannot host {a} rows with 2*{b} marked columns"
        )));
    }
    let grid = gen_bidirected_grid(rows, cols)?;
    let row_of = |i: usize| if a == 1 { 0 } else { i * (rows - 1) / (a - 1) };
    let mut paths = Vec::with_capacity(a);
    let mut a_sets = Vec::with_capacity(a);
    let mut b_sets = Vec::with_capacity(a);
    for i in 0..a {
        let r = row_of(i);
        paths.push((0..cols).map(|c| r * cols + c).collect::<Vec<usize>>());
        a_sets.push((0..b).map(|c| r * cols + c).collect::<BTreeSet<usize>>());
        b_sets.push((cols - b..cols).map(|c| r * cols + c).collect::<BTreeSet<usize>>());
    }
    let ps = PathSystem::new(&grid, paths, a_sets, b_sets)?;
    let exhaustive = 2 * a * b <= DEFAULT_WELL_LINKED_BOUND;
    let report = validate_path_system(&grid, &ps, exhaustive, DEFAULT_WELL_LINKED_BOUND);
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "generated grid system failed validation: {report:?}"
        )));
    }
    Ok((grid, ps))
}

enum Axis {
    Columns,
    Rows,
}

/// Serpentine threaded linkage over a bidirected grid, one linkage path per
/// column (alternating direction), joined by single-arc threads. With
/// `tangle` two threads detour through earlier columns, which makes the
/// walk revisit vertices (overlap exactly 3) and breaks untangledness.
pub fn snake_columns(g: &Digraph, rows: usize, cols: usize, tangle: bool) -> Result<ThreadedLinkage> {
    snake(g, rows, cols, tangle, Axis::Columns)
}

/// Row-wise counterpart of [`snake_columns`].
pub fn snake_rows(g: &Digraph, rows: usize, cols: usize, tangle: bool) -> Result<ThreadedLinkage> {
    snake(g, rows, cols, tangle, Axis::Rows)
}

fn snake(g: &Digraph, rows: usize, cols: usize, tangle: bool, axis: Axis) -> Result<ThreadedLinkage> {
    let (lanes, depth) = match axis {
        Axis::Columns => (cols, rows),
        Axis::Rows => (rows, cols),
    };
    if lanes < 2 || depth < 2 {
        return Err(Error::HypothesisUnmet("snake needs at least a 2x2 grid".into()));
    }
    if tangle && (lanes < 5 || depth < 3) {
        return Err(Error::HypothesisUnmet(
            "tangled snake detours need 5 lanes and depth 3".into(),
        ));
    }
    // (lane, depth) -> vertex id in the underlying grid.
    let id = |l: usize, d: usize| match axis {
        Axis::Columns => d * cols + l,
        Axis::Rows => l * cols + d,
    };

    let mut seq: Vec<usize> = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut paths: Vec<Path> = Vec::new();
    for l in 0..lanes {
        let lane: Vec<usize> = if l % 2 == 0 {
            (0..depth).map(|d| id(l, d)).collect()
        } else {
            (0..depth).rev().map(|d| id(l, d)).collect()
        };
        if l > 0 {
            // Detour threads revisit earlier lanes; the meeting points
            // (lane 1 depth 1 and lane 2 depth 1) are each hit twice.
            if tangle && l == 2 {
                seq.extend([id(0, 0), id(0, 1), id(1, 1), id(2, 1)]);
            }
            if tangle && l == 4 {
                seq.extend([
                    id(2, 0),
                    id(2, 1),
                    id(1, 1),
                    id(1, 2),
                    id(2, 2),
                    id(3, 2),
                    id(3, 1),
                    id(4, 1),
                ]);
            }
        }
        spans.push((seq.len(), seq.len() + depth - 1));
        seq.extend(&lane);
        paths.push(Path::new(g, lane)?);
    }
    let sources: BTreeSet<usize> = paths.iter().map(|p| p.first()).collect();
    let sinks: BTreeSet<usize> = paths.iter().map(|p| p.last()).collect();
    let linkage = Linkage::new(paths, sources, sinks)?;
    ThreadedLinkage::new(g, Walk::open(g, seq)?, linkage, spans)
}

/// Instance with one host path per index and a full set of private relay
/// lanes for every ordered pair: forward lanes from the B-marks to the next
/// host's A-marks and backward lanes returning them. An untrapped pair
/// chains its lanes into one long open walk; a pair listed in `traps` sends
/// the backward lanes of its first three slots straight back to their own
/// start, which closes three detours and pushes the pair into the anchored
/// outcome of the refinement. Hosts are laid out as the A-block followed by
/// B-marks interleaved with separators, so every lane slot has its own
/// private host vertices.
pub fn trapped_lane_system(
    a: usize,
    b: usize,
    traps: &[(usize, usize)],
) -> Result<(Digraph, PathSystem)> {
    if a < 2 {
        return Err(Error::HypothesisUnmet("lane system needs at least two hosts".into()));
    }
    if b < 5 {
        return Err(Error::HypothesisUnmet(
            "lane system needs b >= 5: three trap slots plus a two-lane chain".into(),
        ));
    }
    let trap_set: BTreeSet<(usize, usize)> = traps.iter().copied().collect();
    for &(i, j) in traps {
        if i >= a || j >= a || i == j {
            return Err(Error::HypothesisUnmet(format!("trap ({i},{j}) is not an ordered pair")));
        }
    }

    let host_len = 3 * b - 1; // b A-marks, b B-marks, b-1 separators
    let q = |i: usize, k: usize| i * host_len + k;
    let bm = |i: usize, k: usize| i * host_len + b + 2 * k; // separators sit at odd offsets between
    let lane_base = a * host_len;
    let mut pair_index = std::collections::BTreeMap::new();
    let mut pairs = Vec::new();
    for i in 0..a {
        for j in 0..a {
            if i != j {
                pair_index.insert((i, j), pairs.len());
                pairs.push((i, j));
            }
        }
    }
    let fwd = |p: usize, k: usize| lane_base + p * 2 * b + k;
    let bwd = |p: usize, k: usize| lane_base + p * 2 * b + b + k;

    let mut g = Digraph::new(lane_base + pairs.len() * 2 * b);
    for i in 0..a {
        for v in i * host_len..(i + 1) * host_len - 1 {
            g.add_arc(v, v + 1)?;
        }
    }
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let trapped = trap_set.contains(&(i, j));
        for k in 0..b {
            g.add_arc(bm(i, k), fwd(p, k))?;
            g.add_arc(fwd(p, k), q(j, k))?;
            let target = if trapped {
                match k {
                    0..=2 => k,                          // three closed detours
                    _ => 3 + (k - 3 + 1) % (b - 3),      // chain on the rest
                }
            } else {
                (k + 1) % b
            };
            g.add_arc(q(j, k), bwd(p, k))?;
            g.add_arc(bwd(p, k), bm(i, target))?;
        }
    }

    let mut paths = Vec::with_capacity(a);
    let mut a_sets = Vec::with_capacity(a);
    let mut b_sets = Vec::with_capacity(a);
    for i in 0..a {
        paths.push((i * host_len..(i + 1) * host_len).collect::<Vec<usize>>());
        a_sets.push((0..b).map(|k| q(i, k)).collect::<BTreeSet<usize>>());
        b_sets.push((0..b).map(|k| bm(i, k)).collect::<BTreeSet<usize>>());
    }
    let ps = PathSystem::new(&g, paths, a_sets, b_sets)?;
    let report = validate_path_system(&g, &ps, false, DEFAULT_WELL_LINKED_BOUND);
    if !report.violations.is_empty() {
        return Err(Error::Internal(format!(
            "lane system failed shape validation: {:?}",
            report.violations[0]
        )));
    }
    Ok((g, ps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threading::{build_threaded_linkage, refine_threaded_linkage, RefineOutcome};

    #[test]
    fn bidirected_grid_has_arcs_both_ways() {
        let g = gen_bidirected_grid(3, 4).unwrap();
        assert_eq!(g.n(), 12);
        assert!(g.has_arc(0, 1) && g.has_arc(1, 0));
        assert!(g.has_arc(0, 4) && g.has_arc(4, 0));
        assert!(!g.has_arc(0, 5));
    }

    #[test]
    fn cylindrical_grid_counts_and_degrees() {
        let g = gen_cylindrical_grid(2).unwrap();
        assert_eq!(g.n(), 8);
        for v in 0..g.n() {
            let d = g.out_neighbors(v).len();
            assert!(d == 1 || d == 2, "vertex {v} has out-degree {d}");
        }
        for gg in [3usize, 4] {
            let dg = gen_cylindrical_grid(gg).unwrap();
            assert_eq!(dg.n(), 2 * gg * gg);
        }
        assert!(gen_cylindrical_grid(1).is_err());
    }

    #[test]
    fn grid_path_system_is_validated_on_the_way_out() {
        let (g, ps) = gen_grid_path_system(6, 2, 2).unwrap();
        assert_eq!(ps.a_count(), 2);
        assert_eq!(ps.set_size(), 2);
        let report = validate_path_system(&g, &ps, true, DEFAULT_WELL_LINKED_BOUND);
        assert!(report.is_valid());
        assert!(gen_grid_path_system(4, 5, 2).is_err());
        assert!(gen_grid_path_system(4, 2, 3).is_err());
        let (g, ps) = gen_rect_path_system(5, 6, 2, 2).unwrap();
        assert_eq!(g.n(), 30);
        assert!(validate_path_system(&g, &ps, true, DEFAULT_WELL_LINKED_BOUND).is_valid());
    }

    #[test]
    fn snakes_thread_whole_grids() {
        let g = gen_bidirected_grid(6, 6).unwrap();
        let cols = snake_columns(&g, 6, 6, false).unwrap();
        assert_eq!(cols.size(), 6);
        assert_eq!(cols.walk().length(), 36);
        assert_eq!(cols.overlap(), 1);
        assert!(cols.is_untangled());
        let rows = snake_rows(&g, 6, 6, false).unwrap();
        assert_eq!(rows.size(), 6);
        assert!(rows.is_untangled());
    }

    #[test]
    fn tangled_snakes_have_overlap_exactly_three() {
        let g = gen_bidirected_grid(6, 6).unwrap();
        for tl in [snake_columns(&g, 6, 6, true).unwrap(), snake_rows(&g, 6, 6, true).unwrap()] {
            assert_eq!(tl.overlap(), 3);
            assert!(!tl.is_untangled());
        }
    }

    #[test]
    fn untrapped_lane_pairs_refine_untangled_and_trapped_ones_anchor() {
        let (g, ps) = trapped_lane_system(2, 5, &[(1, 0)]).unwrap();
        let open = build_threaded_linkage(&g, &ps, 0, 1).unwrap();
        assert_eq!(open.size(), 5);
        assert_eq!(open.overlap(), 1);
        match refine_threaded_linkage(&g, &open, 5, 1).unwrap() {
            RefineOutcome::Untangled(sub) => assert_eq!(sub.size(), 5),
            RefineOutcome::ClosedWalks(_) => panic!("untrapped pair must stay untangled"),
        }
        let trapped = build_threaded_linkage(&g, &ps, 1, 0).unwrap();
        assert_eq!(trapped.size(), 5);
        assert_eq!(trapped.overlap(), 2);
        match refine_threaded_linkage(&g, &trapped, 5, 1).unwrap() {
            RefineOutcome::ClosedWalks(fam) => {
                assert_eq!(fam.len(), 3);
                for (w, anc) in fam.walks().iter().zip(fam.anchors()) {
                    assert_eq!(w.length(), 4);
                    assert_eq!(anc.len(), 1);
                    assert_eq!(anc[0].0, 0);
                }
            }
            RefineOutcome::Untangled(_) => panic!("trapped pair must close its detours"),
        }
    }
}
