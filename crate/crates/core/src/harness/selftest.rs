//! The nine acceptance checks, shared by the integration suite and the
//! `selftest` subcommand. Each one returns a short summary of what it
//! measured, or the first failure it ran into. Seeds are fixed so a
//! failing check replays byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bowtie::bowtie_with_threshold;
use crate::combinatorics::{
    degeneracy, partition_bipartite, validate_segment_pairs, SegmentPair, UGraph,
};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linkage::{is_well_linked_with_bound, Linkage, PathSystem};
use crate::orchestrator::{case_analysis, compute_params, run_pipeline, Overrides};
use crate::scenarios::{dense_scenario, sparse_scenario, sparse_wrapped, Bramble};
use crate::threading::{
    build_threaded_linkage, refine_threaded_linkage, RefineOutcome, ThreadedLinkage,
};
use crate::walk::{Path, Walk, WalkFamily};

use super::gen::{
    gen_bidirected_grid, gen_grid_path_system, gen_rect_path_system, snake_columns, snake_rows,
};
use super::order::{bramble_order, exhaustive_min_hitting_set};
use super::verify::verify_bramble;

pub type Check = fn() -> Result<String>;

/// Check number, what it watches, and the function to run.
pub fn checks() -> [(usize, &'static str, Check); 9] {
    [
        (1, "threading overlap and concatenation shape", criterion_1),
        (2, "refinement dichotomy", criterion_2),
        (3, "crossing congestion table", criterion_3),
        (4, "bipartite partition clauses", criterion_4),
        (5, "scenario congestion bounds", criterion_5),
        (6, "case counting inequality", criterion_6),
        (7, "parameter chain arithmetic", criterion_7),
        (8, "end-to-end smoke run", criterion_8),
        (9, "oracle agreement", criterion_9),
    ]
}

fn fail(msg: String) -> Error {
    Error::Internal(msg)
}

/// Grid systems (rows, cols, a, b) with both dimensions <= 10, a <= 3,
/// b <= 3, every one passing the exhaustive well-linkedness check. The
/// square entries stop short of some (a, b) ranges for a reason: with
/// marks pinned to the outer b columns, a middle host row gives a
/// horizontal cut of size g - 2b, so a >= 3 forces g >= 4b. That kills
/// (3, 3) outright for g <= 10 and caps (3, 2) at g >= 8. The slowest
/// exhaustive checks (g >= 9 with 2ab = 12) are left out to keep this
/// under the ten second budget; rectangular grids fill the count back up.
fn grid_catalog() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for g in 2..=10 {
        out.push((g, g, 1, 1));
    }
    for g in 4..=10 {
        out.push((g, g, 1, 2));
    }
    for g in 6..=10 {
        out.push((g, g, 1, 3));
    }
    for g in 3..=10 {
        out.push((g, g, 2, 1));
    }
    for g in 5..=10 {
        out.push((g, g, 2, 2));
    }
    out.push((7, 7, 2, 3));
    for g in 4..=10 {
        out.push((g, g, 3, 1));
    }
    out.push((8, 8, 3, 2));
    out.extend([
        (2, 3, 1, 1),
        (3, 2, 1, 1),
        (2, 4, 1, 2),
        (2, 5, 1, 2),
        (3, 4, 1, 2),
        (3, 6, 1, 3),
        (3, 4, 2, 1),
        (4, 3, 2, 1),
        (3, 5, 2, 1),
        (5, 3, 2, 1),
        (4, 5, 2, 1),
        (5, 4, 2, 1),
        (4, 7, 2, 2),
        (5, 6, 2, 2),
        (5, 7, 2, 2),
        (6, 5, 2, 2),
        (6, 7, 2, 2),
        (7, 6, 2, 2),
        (5, 8, 2, 2),
        (4, 5, 3, 1),
        (5, 4, 3, 1),
        (4, 6, 3, 1),
        (6, 4, 3, 1),
        (5, 6, 3, 1),
        (6, 5, 3, 1),
    ]);
    out
}

pub fn criterion_1() -> Result<String> {
    let t0 = Instant::now();
    let catalog = grid_catalog();
    if catalog.len() < 50 {
        return Err(fail(format!("catalog holds only {} systems", catalog.len())));
    }
    let mut built = 0usize;
    let mut worst = 0usize;
    for &(rows, cols, a, b) in &catalog {
        let (g, ps) = gen_rect_path_system(rows, cols, a, b)?;
        for i in 0..a {
            for j in 0..a {
                if i == j {
                    continue;
                }
                let tl = build_threaded_linkage(&g, &ps, i, j)?;
                worst = worst.max(tl.overlap());
                if tl.overlap() > 3 {
                    return Err(fail(format!(
                        "{rows}x{cols} a={a} b={b} pair ({i},{j}): overlap {}",
                        tl.overlap()
                    )));
                }
                // Rebuild from raw parts: the constructor is the
                // concatenation checker.
                ThreadedLinkage::new(
                    &g,
                    tl.walk().clone(),
                    tl.linkage().clone(),
                    tl.spans().to_vec(),
                )?;
                built += 1;
            }
        }
    }
    let ms = t0.elapsed().as_millis();
    if ms >= 10_000 {
        return Err(fail(format!("took {ms} ms, budget is 10 s")));
    }
    Ok(format!(
        "{} systems, {built} threaded linkages, max overlap {worst}, {ms} ms",
        catalog.len()
    ))
}

fn admissible_splits(b: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 1..=b {
        for x in 1..=b {
            if x * d + (d - 1) <= b {
                out.push((x, d));
            }
        }
    }
    out
}

pub fn criterion_2() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1c4);
    let mut trials = 0usize;
    let mut anchored = 0usize;
    let mut untangled = 0usize;
    for &(rows, cols, a, b) in
        &[(5usize, 5usize, 2usize, 2usize), (6, 6, 2, 2), (7, 7, 2, 2), (7, 7, 2, 3), (8, 8, 3, 2)]
    {
        let (base, ps) = gen_rect_path_system(rows, cols, a, b)?;
        for _ in 0..7 {
            let mut g = base.clone();
            let mut added = 0;
            while added < rows + cols {
                let u = rng.gen_range(0..g.n());
                let v = rng.gen_range(0..g.n());
                if u != v && !g.has_arc(u, v) {
                    g.add_arc(u, v)?;
                    added += 1;
                }
            }
            for i in 0..a {
                for j in 0..a {
                    if i == j {
                        continue;
                    }
                    let tl = build_threaded_linkage(&g, &ps, i, j)?;
                    for (x, d) in admissible_splits(b) {
                        trials += 1;
                        match refine_threaded_linkage(&g, &tl, x, d)? {
                            RefineOutcome::ClosedWalks(fam) => {
                                anchored += 1;
                                if fam.len() < d {
                                    return Err(fail(format!(
                                        "x={x} d={d}: only {} closed walks",
                                        fam.len()
                                    )));
                                }
                                if fam.overlap() > tl.overlap() {
                                    return Err(fail(format!(
                                        "family overlap {} above input overlap {}",
                                        fam.overlap(),
                                        tl.overlap()
                                    )));
                                }
                                for (w, anc) in fam.walks().iter().zip(fam.anchors()) {
                                    if !w.is_closed() || anc.is_empty() {
                                        return Err(fail("walk not closed or unanchored".into()));
                                    }
                                    for (_, p) in anc {
                                        if !w.contains_contiguous(p.seq()) {
                                            return Err(fail("anchor not contiguous".into()));
                                        }
                                    }
                                }
                            }
                            RefineOutcome::Untangled(sub) => {
                                untangled += 1;
                                if !sub.is_untangled() {
                                    return Err(fail("outcome 2 is tangled".into()));
                                }
                                if sub.size() < x {
                                    return Err(fail(format!(
                                        "outcome 2 kept {} paths, needs {x}",
                                        sub.size()
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if trials < 200 {
        return Err(fail(format!("only {trials} trials")));
    }
    Ok(format!("{trials} refinements: {anchored} anchored, {untangled} untangled"))
}

fn anchors_cover_both(
    fam_walk: &Walk,
    anchors: &[(usize, Path)],
    tl1: &ThreadedLinkage,
    tl2: &ThreadedLinkage,
) -> bool {
    let full = |tl: &ThreadedLinkage, p: &Path| {
        tl.linkage().paths().iter().any(|q| q.seq() == p.seq())
    };
    let ok0 = anchors
        .iter()
        .any(|(l, p)| *l == 0 && full(tl1, p) && fam_walk.contains_contiguous(p.seq()));
    let ok1 = anchors
        .iter()
        .any(|(l, p)| *l == 1 && full(tl2, p) && fam_walk.contains_contiguous(p.seq()));
    ok0 && ok1
}

pub fn criterion_3() -> Result<String> {
    let g = gen_bidirected_grid(10, 12)?;
    let cu = snake_columns(&g, 10, 12, false)?;
    let ru = snake_rows(&g, 10, 12, false)?;
    let ct = snake_columns(&g, 10, 12, true)?;
    let rt = snake_rows(&g, 10, 12, true)?;
    if cu.overlap() != 1 || ru.overlap() != 1 || ct.overlap() != 3 || rt.overlap() != 3 {
        return Err(fail("snake overlaps drifted from 1 / 3".into()));
    }
    let cases: [(&ThreadedLinkage, &ThreadedLinkage, usize, &str); 3] = [
        (&cu, &ru, 2, "both untangled"),
        (&cu, &rt, 4, "one untangled, one overlap 3"),
        (&ct, &rt, 6, "overlap 3 against overlap 3"),
    ];
    let mut measured = Vec::new();
    for (t1, t2, cap, label) in cases {
        for d in [1usize, 2] {
            let fam = bowtie_with_threshold(&g, t1, t2, d, 2)?;
            if fam.len() != d {
                return Err(fail(format!("{label}, d={d}: got {} walks", fam.len())));
            }
            if fam.congestion() > cap {
                return Err(fail(format!(
                    "{label}, d={d}: congestion {} above {cap}",
                    fam.congestion()
                )));
            }
            for (w, anc) in fam.walks().iter().zip(fam.anchors()) {
                if !w.is_closed() {
                    return Err(fail(format!("{label}: open crossing walk")));
                }
                if !anchors_cover_both(w, anc, t1, t2) {
                    return Err(fail(format!("{label}: walk missing a full-path anchor")));
                }
            }
            if d == 2 {
                measured.push(format!("{label}: {} <= {cap}", fam.congestion()));
            }
        }
    }
    Ok(measured.join("; "))
}

fn check_segments(
    g: &UGraph,
    x_order: &[usize],
    y_order: &[usize],
    k: usize,
    r: usize,
    pairs: &[SegmentPair],
) -> Result<()> {
    if pairs.len() != k {
        return Err(fail(format!("{} segment pairs, wanted {k}", pairs.len())));
    }
    let run_of = |order: &[usize], seg: &[usize]| -> bool {
        if seg.is_empty() {
            return false;
        }
        match order.iter().position(|&v| v == seg[0]) {
            Some(p) => p + seg.len() <= order.len() && order[p..p + seg.len()] == *seg,
            None => false,
        }
    };
    let mut seen_x = BTreeSet::new();
    let mut seen_y = BTreeSet::new();
    for sp in pairs {
        if !run_of(x_order, &sp.x) || !run_of(y_order, &sp.y) {
            return Err(fail("segment is not a run of its side order".into()));
        }
        for &v in &sp.x {
            if !seen_x.insert(v) {
                return Err(fail(format!("x vertex {v} reused")));
            }
        }
        for &v in &sp.y {
            if !seen_y.insert(v) {
                return Err(fail(format!("y vertex {v} reused")));
            }
        }
        let in_y: BTreeSet<usize> = sp.y.iter().copied().collect();
        let edges: usize =
            sp.x.iter().map(|&u| g.neighbors(u).iter().filter(|v| in_y.contains(v)).count()).sum();
        if 2 * edges < r * (sp.x.len() + sp.y.len()) {
            return Err(fail(format!(
                "average degree {:.2} below r = {r}",
                2.0 * edges as f64 / (sp.x.len() + sp.y.len()) as f64
            )));
        }
    }
    Ok(())
}

pub fn criterion_4() -> Result<String> {
    let t0 = Instant::now();
    let mut notes = Vec::new();
    for (r, k) in [(2usize, 1usize), (2, 2), (5, 1)] {
        let m = (1usize << 9) * r * k;
        let mut g = UGraph::new(2 * m);
        for u in 0..m {
            for v in m..2 * m {
                g.add_edge(u, v)?;
            }
        }
        let x_order: Vec<usize> = (0..m).collect();
        let y_order: Vec<usize> = (m..2 * m).collect();
        let parts = partition_bipartite(&g, &x_order, &y_order, k, r)?;
        validate_segment_pairs(&g, &x_order, &y_order, r, &parts)?;
        check_segments(&g, &x_order, &y_order, k, r, &parts)?;
        notes.push(format!("m={m}: {k} pairs at r={r}"));
    }
    let ms = t0.elapsed().as_millis();
    if ms >= 30_000 {
        return Err(fail(format!("took {ms} ms, budget is 30 s")));
    }
    Ok(format!("{}, {ms} ms", notes.join("; ")))
}

const STAR_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

/// Rank of j among the two hosts other than i; 0 or 1. Spreads relay
/// endpoints so nothing collides on a mark.
fn star_slot(i: usize, j: usize) -> usize {
    usize::from((0..3).filter(|&h| h != i).position(|h| h == j).unwrap() == 1)
}

fn star_hosts(extra: usize) -> Result<(Digraph, PathSystem)> {
    let mut g = Digraph::new(12 + extra);
    for i in 0..3 {
        for v in 4 * i..4 * i + 3 {
            g.add_arc(v, v + 1)?;
        }
    }
    let paths: Vec<Vec<usize>> = (0..3).map(|i| (4 * i..4 * i + 4).collect()).collect();
    let a_sets = (0..3).map(|i| BTreeSet::from([4 * i, 4 * i + 1])).collect();
    let b_sets = (0..3).map(|i| BTreeSet::from([4 * i + 2, 4 * i + 3])).collect();
    let ps = PathSystem::new(&g, paths, a_sets, b_sets)?;
    Ok((g, ps))
}

fn star_endpoints(i: usize, j: usize) -> (usize, usize) {
    (4 * i + 2 + star_slot(i, j), 4 * j + star_slot(j, i))
}

/// Hosts plus one private relay vertex per ordered pair; connectors are
/// pairwise disjoint.
fn star_private() -> Result<(Digraph, PathSystem, BTreeMap<(usize, usize), Path>)> {
    let (mut g, _) = star_hosts(6)?;
    let mut connectors = BTreeMap::new();
    for (p, &(i, j)) in STAR_PAIRS.iter().enumerate() {
        let mid = 12 + p;
        let (from, to) = star_endpoints(i, j);
        g.add_arc(from, mid)?;
        g.add_arc(mid, to)?;
        connectors.insert((i, j), Path::new(&g, vec![from, mid, to])?);
    }
    let (_, ps) = star_hosts(6)?;
    Ok((g, ps, connectors))
}

/// Hosts plus one relay per unordered pair, shared by both directions, so
/// connector congestion is exactly 2.
fn star_shared() -> Result<(Digraph, PathSystem, BTreeMap<(usize, usize), Path>)> {
    let (mut g, _) = star_hosts(3)?;
    let mid_of = |i: usize, j: usize| 12 + i.min(j) + i.max(j) - 1;
    let mut connectors = BTreeMap::new();
    for &(i, j) in &STAR_PAIRS {
        let mid = mid_of(i, j);
        let (from, to) = star_endpoints(i, j);
        g.add_arc(from, mid)?;
        g.add_arc(mid, to)?;
        connectors.insert((i, j), Path::new(&g, vec![from, mid, to])?);
    }
    let (_, ps) = star_hosts(3)?;
    Ok((g, ps, connectors))
}

/// Hosts plus two parallel relay lanes per ordered pair, packaged as
/// linkages for the wrapped route.
fn star_lanes() -> Result<(Digraph, PathSystem, BTreeMap<(usize, usize), Linkage>)> {
    let (mut g, _) = star_hosts(12)?;
    let mut arcs = Vec::new();
    for (p, &(i, j)) in STAR_PAIRS.iter().enumerate() {
        for s in 0..2 {
            let mid = 12 + 2 * p + s;
            let from = 4 * i + 2 + s;
            let to = 4 * j + s;
            g.add_arc(from, mid)?;
            g.add_arc(mid, to)?;
            arcs.push(((i, j), vec![from, mid, to]));
        }
    }
    let (_, ps) = star_hosts(12)?;
    let mut linkages = BTreeMap::new();
    for &(i, j) in &STAR_PAIRS {
        let paths: Vec<Path> = arcs
            .iter()
            .filter(|(key, _)| *key == (i, j))
            .map(|(_, seq)| Path::new(&g, seq.clone()))
            .collect::<Result<_>>()?;
        linkages.insert((i, j), Linkage::new(paths, ps.b_set(i).clone(), ps.a_set(j).clone())?);
    }
    Ok((g, ps, linkages))
}

pub fn criterion_5() -> Result<String> {
    let pairs: BTreeSet<(usize, usize)> = STAR_PAIRS.into_iter().collect();
    let mut notes = Vec::new();

    let (g1, ps1, conn1) = star_private()?;
    let b1 = sparse_scenario(&g1, &ps1, &pairs, &conn1, 1, 11)?;
    if b1.congestion() > 4 {
        return Err(fail(format!("single-relay route congestion {}", b1.congestion())));
    }
    if !verify_bramble(&g1, &b1).is_valid() {
        return Err(fail("single-relay bramble fails verification".into()));
    }
    notes.push(format!("alpha=1: {} <= 4", b1.congestion()));

    let (g2, ps2, conn2) = star_shared()?;
    let b2 = sparse_scenario(&g2, &ps2, &pairs, &conn2, 2, 12)?;
    if b2.congestion() > 6 {
        return Err(fail(format!("shared-relay route congestion {}", b2.congestion())));
    }
    if !verify_bramble(&g2, &b2).is_valid() {
        return Err(fail("shared-relay bramble fails verification".into()));
    }
    notes.push(format!("alpha=2: {} <= 6", b2.congestion()));

    let (g3, ps3, lks) = star_lanes()?;
    let b3 = sparse_wrapped(&g3, &ps3, &pairs, &lks, 1, 13)?;
    if b3.congestion() > 4 {
        return Err(fail(format!("wrapped route congestion {}", b3.congestion())));
    }
    if !verify_bramble(&g3, &b3).is_valid() {
        return Err(fail("wrapped bramble fails verification".into()));
    }
    notes.push(format!("wrapped: {} <= 4", b3.congestion()));

    let mut g4 = Digraph::new(7);
    for u in 0..7 {
        for v in 0..7 {
            if u != v {
                g4.add_arc(u, v)?;
            }
        }
    }
    let walks: Vec<Walk> = (1..7).map(|t| Walk::closed(&g4, vec![0, t, 0])).collect::<Result<_>>()?;
    let fam = WalkFamily::new(walks);
    let b4 = dense_scenario(&g4, &fam, 3, 4, 14)?
        .ok_or_else(|| fail("dense route found no minor in a hub family".into()))?;
    if b4.congestion() > fam.congestion() {
        return Err(fail(format!(
            "dense congestion {} above family congestion {}",
            b4.congestion(),
            fam.congestion()
        )));
    }
    if !verify_bramble(&g4, &b4).is_valid() {
        return Err(fail("dense bramble fails verification".into()));
    }
    notes.push(format!("dense: {} <= {}", b4.congestion(), fam.congestion()));
    Ok(notes.join("; "))
}

pub fn criterion_6() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca5e);
    let mut by_case = [0usize; 4];
    for trial in 0..10_000 {
        let a = rng.gen_range(2..=5);
        let mut pairs = BTreeSet::new();
        for i in 0..a {
            for j in 0..a {
                if i != j {
                    pairs.insert((i, j));
                }
            }
        }
        let z: BTreeSet<(usize, usize)> =
            pairs.iter().filter(|_| rng.gen_bool(0.3)).copied().collect();
        let mut open: Vec<(usize, usize)> =
            pairs.iter().filter(|p| !z.contains(p)).copied().collect();
        for t in (1..open.len()).rev() {
            open.swap(t, rng.gen_range(0..=t));
        }
        let mut m1 = Vec::new();
        let mut it = open.chunks_exact(2);
        for pair in &mut it {
            if rng.gen_bool(0.5) {
                m1.push((pair[0], pair[1]));
            }
        }
        let mut blocked: BTreeSet<(usize, usize)> = z.clone();
        for &(u, v) in &m1 {
            blocked.insert(u);
            blocked.insert(v);
        }
        let all: Vec<(usize, usize)> = pairs.iter().copied().collect();
        let mut used2 = BTreeSet::new();
        let mut m2 = Vec::new();
        for _ in 0..pairs.len() {
            let u = all[rng.gen_range(0..all.len())];
            let v = all[rng.gen_range(0..all.len())];
            if u == v || used2.contains(&u) || used2.contains(&v) {
                continue;
            }
            if blocked.contains(&u) && blocked.contains(&v) {
                continue;
            }
            if rng.gen_bool(0.6) {
                used2.insert(u);
                used2.insert(v);
                m2.push((u, v));
            }
        }
        let case = case_analysis(&pairs, &z, &m1, &m2)?;
        let v1: BTreeSet<_> = m1.iter().flat_map(|&(u, v)| [u, v]).collect();
        let v2: BTreeSet<_> = m2.iter().flat_map(|&(u, v)| [u, v]).collect();
        let n = pairs.len();
        let c1 = pairs.iter().filter(|p| !v1.contains(p) && !z.contains(p)).count();
        let c2 = pairs.iter().filter(|p| v1.contains(p) || v2.contains(p) || z.contains(p)).count();
        let c3 = pairs.iter().filter(|p| !v2.contains(p)).count();
        if 2 * c1 + 2 * c2 + c3 < 3 * n {
            return Err(fail(format!(
                "trial {trial}: 2*{c1} + 2*{c2} + {c3} < 3*{n}"
            )));
        }
        let won = match case {
            1 => c1,
            2 => c2,
            3 => c3,
            other => return Err(fail(format!("trial {trial}: case {other}"))),
        };
        if 10 * won < 6 * n {
            return Err(fail(format!("trial {trial}: case {case} holds {won} of {n}")));
        }
        by_case[case] += 1;
    }
    Ok(format!(
        "10000 classifications: case1 {} / case2 {} / case3 {}",
        by_case[1], by_case[2], by_case[3]
    ))
}

pub fn criterion_7() -> Result<String> {
    let e = std::f64::consts::E;
    let mut notes = Vec::new();
    for k in [2usize, 3, 5, 10] {
        let p = compute_params(k, 1.0, 0)?;
        if k == 2 && p.a_exact != 17.0 {
            return Err(fail(format!("a(2) = {}, expected 17", p.a_exact)));
        }
        let aa = p.a_exact * p.a_exact;
        if p.d1_exact < p.d2_exact || p.d2_exact < p.d3_exact {
            return Err(fail(format!("k={k}: density chain out of order")));
        }
        if p.d2_exact / 2560.0 < 4.0 * e * aa * p.d3_exact {
            return Err(fail(format!("k={k}: d2 split cannot fund d3 demand")));
        }
        if p.d1_exact / 2560.0 < 4.0 * e * aa * p.d2_exact {
            return Err(fail(format!("k={k}: d1 split cannot fund d2 demand")));
        }
        let x = 4.0 * e * aa * p.d1_exact + 1.0;
        let d = (p.d1_exact / 2560.0).ceil();
        if p.b_exact < x * d + (d - 1.0) {
            return Err(fail(format!("k={k}: b cannot fund the refinement split")));
        }
        notes.push(format!("k={k}: a={}", p.a_exact));
    }
    Ok(notes.join(", "))
}

pub fn criterion_8() -> Result<String> {
    let t0 = Instant::now();
    let overrides =
        Overrides { a: None, b: Some(4), d1: Some(8), d2: Some(8), d3: Some(1) };
    let params = compute_params(2, 0.25, 2026)?.with_overrides(&overrides);
    if params.a != 4 {
        return Err(fail(format!("sigma 0.25 scaled a to {}, wanted 4", params.a)));
    }
    let (g, ps) = gen_grid_path_system(8, params.a, params.b)?;
    let (bramble, report) = run_pipeline(&g, &ps, &params)?;
    let vr = verify_bramble(&g, &bramble);
    if !vr.is_valid() {
        return Err(fail(format!("output bramble rejected: {:?}", vr.violations[0])));
    }
    if bramble.congestion() > 8 {
        return Err(fail(format!("congestion {}", bramble.congestion())));
    }
    let ms = t0.elapsed().as_millis();
    if ms >= 60_000 {
        return Err(fail(format!("took {ms} ms, budget is 60 s")));
    }
    let route = match report.case {
        0 => "dense shortcut".to_string(),
        c => format!("case {c}"),
    };
    Ok(format!(
        "{route}, size {} against k = {}{}, congestion {}, {ms} ms",
        report.bramble_size,
        params.k,
        if report.size_shortfall { " (shortfall)" } else { "" },
        report.congestion
    ))
}

/// Backtracking disjoint-path packing: every source gets its own simple
/// path to a distinct free sink, all paths pairwise vertex-disjoint and
/// avoiding `removed`. Terminals block through-traffic, matching what a
/// unit-capacity flow admits.
fn packable(
    g: &Digraph,
    sources: &[usize],
    sinks: &BTreeSet<usize>,
    removed: &BTreeSet<usize>,
) -> bool {
    fn route(
        g: &Digraph,
        sources: &[usize],
        si: usize,
        used: &mut BTreeSet<usize>,
        free: &mut BTreeSet<usize>,
    ) -> bool {
        if si == sources.len() {
            return true;
        }
        grow(g, sources, si, sources[si], used, free)
    }
    fn grow(
        g: &Digraph,
        sources: &[usize],
        si: usize,
        v: usize,
        used: &mut BTreeSet<usize>,
        free: &mut BTreeSet<usize>,
    ) -> bool {
        for &w in g.out_neighbors(v) {
            if free.contains(&w) {
                free.remove(&w);
                used.insert(w);
                if route(g, sources, si + 1, used, free) {
                    return true;
                }
                used.remove(&w);
                free.insert(w);
            } else if !used.contains(&w) {
                used.insert(w);
                if grow(g, sources, si, w, used, free) {
                    return true;
                }
                used.remove(&w);
            }
        }
        false
    }
    let mut used: BTreeSet<usize> = removed.clone();
    used.extend(sources.iter().copied());
    let mut free = sinks.clone();
    route(g, sources, 0, &mut used, &mut free)
}

fn brute_well_linked(g: &Digraph, x: &BTreeSet<usize>) -> bool {
    let xs: Vec<usize> = x.iter().copied().collect();
    let k = xs.len();
    for sm in 1u32..(1 << k) {
        for tm in 1u32..(1 << k) {
            if sm & tm != 0 || sm.count_ones() != tm.count_ones() {
                continue;
            }
            let sources: Vec<usize> =
                (0..k).filter(|&i| sm & (1 << i) != 0).map(|i| xs[i]).collect();
            let sinks: BTreeSet<usize> =
                (0..k).filter(|&i| tm & (1 << i) != 0).map(|i| xs[i]).collect();
            let removed: BTreeSet<usize> = (0..k)
                .filter(|&i| (sm | tm) & (1 << i) == 0)
                .map(|i| xs[i])
                .collect();
            if !packable(g, &sources, &sinks, &removed) {
                return false;
            }
        }
    }
    true
}

fn dp_degeneracy(g: &UGraph) -> usize {
    let n = g.n();
    let full: usize = (1 << n) - 1;
    let mut memo = vec![0usize; full + 1];
    for mask in 1..=full {
        let mut best = usize::MAX;
        for v in 0..n {
            if mask & (1 << v) == 0 {
                continue;
            }
            let deg = g.neighbors(v).iter().filter(|&&w| mask & (1 << w) != 0).count();
            best = best.min(deg.max(memo[mask & !(1 << v)]));
        }
        memo[mask] = best;
    }
    memo[full]
}

pub fn criterion_9() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bac1e);

    let mut k20 = Digraph::new(20);
    for u in 0..20 {
        for v in 0..20 {
            if u != v {
                k20.add_arc(u, v)?;
            }
        }
    }
    for case in 0..50 {
        let cnt = rng.gen_range(3..=8);
        let mut elements = Vec::with_capacity(cnt);
        let mut witnesses = Vec::with_capacity(cnt);
        for _ in 0..cnt {
            let target = rng.gen_range(1..=5);
            let mut el = BTreeSet::new();
            while el.len() < target {
                el.insert(rng.gen_range(0..20));
            }
            let seq: Vec<usize> = el.iter().copied().collect();
            let w = if seq.len() == 1 {
                Walk::open(&k20, seq.clone())?
            } else {
                let mut s = seq.clone();
                s.push(seq[0]);
                Walk::closed(&k20, s)?
            };
            elements.push(el);
            witnesses.push(w);
        }
        let b = Bramble::new(&k20, elements.clone(), witnesses)?;
        let got = bramble_order(&k20, &b, 64).exact;
        let want = exhaustive_min_hitting_set(&elements);
        if got != want {
            return Err(fail(format!("order case {case}: {got:?} vs exhaustive {want:?}")));
        }
    }

    let mut linked = 0usize;
    for case in 0..100 {
        let n = rng.gen_range(4..=6);
        let mut g = Digraph::new(n);
        if case % 2 == 0 {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.7) {
                        g.add_arc(u, v)?;
                        g.add_arc(v, u)?;
                    }
                }
            }
        } else {
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.35) {
                        g.add_arc(u, v)?;
                    }
                }
            }
        }
        let xsz = rng.gen_range(2..=4.min(n));
        let mut x = BTreeSet::new();
        while x.len() < xsz {
            x.insert(rng.gen_range(0..n));
        }
        let fast = is_well_linked_with_bound(&g, &x, 12)?;
        if fast != brute_well_linked(&g, &x) {
            return Err(fail(format!("well-linkedness case {case} disagrees")));
        }
        linked += usize::from(fast);
    }
    if linked == 0 || linked == 100 {
        return Err(fail(format!("well-linkedness cases one-sided: {linked} of 100")));
    }

    for case in 0..30 {
        let n = rng.gen_range(4..=8);
        let mut g = UGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.4) {
                    g.add_edge(u, v)?;
                }
            }
        }
        if degeneracy(&g).0 != dp_degeneracy(&g) {
            return Err(fail(format!("degeneracy case {case} disagrees")));
        }
    }

    Ok(format!(
        "50 hitting sets, 100 linkedness checks ({linked} linked), 30 peelings agree"
    ))
}
