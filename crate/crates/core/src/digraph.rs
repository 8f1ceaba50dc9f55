//! Directed host graphs.
//!
//! Vertices are dense ids `0..n-1`. Self-loops and parallel arcs are
//! rejected at insertion, so neighbor lists double as arc sets. Graphs are
//! immutable once built; every algorithm in the crate takes `&Digraph`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    m: usize,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.m
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange(v, self.n));
        }
        Ok(())
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.has_arc(u, v) {
            return Err(Error::DuplicateArc(u, v));
        }
        let pos = self.out[u].binary_search(&v).unwrap_err();
        self.out[u].insert(pos, v);
        let pos = self.inn[v].binary_search(&u).unwrap_err();
        self.inn[v].insert(pos, u);
        self.m += 1;
        Ok(())
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out[u].binary_search(&v).is_ok()
    }

    /// Out-neighbors in ascending order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// In-neighbors in ascending order.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out[u].iter().map(move |&v| (u, v)))
    }

    /// Vertices of `set` reachable from `start` without leaving `set`.
    fn reach_within(&self, start: usize, set: &BTreeSet<usize>, forward: bool) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let nbrs = if forward { &self.out[u] } else { &self.inn[u] };
            for &w in nbrs {
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// True iff the subgraph induced by `set` is strongly connected.
    /// The empty set has no sensible answer and is an error.
    pub fn is_strongly_connected(&self, set: &BTreeSet<usize>) -> Result<bool> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in set {
            self.check_vertex(v)?;
        }
        let start = *set.iter().next().unwrap();
        if self.reach_within(start, set, true).len() != set.len() {
            return Ok(false);
        }
        Ok(self.reach_within(start, set, false).len() == set.len())
    }

    /// Parses the "n m" / "u v" line format. Lines are 1-indexed in errors.
    pub fn parse(text: &str) -> Result<Digraph> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
        let mut it = header.split_whitespace();
        let parse_num = |tok: Option<&str>, line: usize| -> Result<usize> {
            tok.ok_or_else(|| Error::Parse { line, msg: "expected two integers".into() })?
                .parse::<usize>()
                .map_err(|e| Error::Parse { line, msg: e.to_string() })
        };
        let n = parse_num(it.next(), 1)?;
        let m = parse_num(it.next(), 1)?;
        if it.next().is_some() {
            return Err(Error::Parse { line: 1, msg: "trailing tokens after 'n m'".into() });
        }
        let mut g = Digraph::new(n);
        let mut count = 0usize;
        for (idx, raw) in lines {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let mut it = raw.split_whitespace();
            let u = parse_num(it.next(), line)?;
            let v = parse_num(it.next(), line)?;
            if it.next().is_some() {
                return Err(Error::Parse { line, msg: "trailing tokens after 'u v'".into() });
            }
            g.add_arc(u, v).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            count += 1;
        }
        if count != m {
            return Err(Error::Parse {
                line: count + 1,
                msg: format!("header promised {m} arcs, found {count}"),
            });
        }
        Ok(g)
    }

    /// Inverse of [`Digraph::parse`]; arcs in ascending (u, v) order, LF endings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m);
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        let mut g = Digraph::new(n);
        for v in 0..n {
            g.add_arc(v, (v + 1) % n).unwrap();
        }
        g
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let mut g = Digraph::new(3);
        assert_eq!(g.add_arc(1, 1), Err(Error::SelfLoop(1)));
        g.add_arc(0, 1).unwrap();
        assert_eq!(g.add_arc(0, 1), Err(Error::DuplicateArc(0, 1)));
        assert_eq!(g.add_arc(0, 7), Err(Error::VertexOutOfRange(7, 3)));
        assert_eq!(g.arc_count(), 1);
    }

    #[test]
    fn strong_connectivity_on_cycles_and_fragments() {
        let g = cycle(4);
        let all: BTreeSet<_> = (0..4).collect();
        assert!(g.is_strongly_connected(&all).unwrap());
        // Dropping one vertex breaks the only cycle.
        let part: BTreeSet<_> = [0, 1, 2].into_iter().collect();
        assert!(!g.is_strongly_connected(&part).unwrap());
        let single: BTreeSet<_> = [2].into_iter().collect();
        assert!(g.is_strongly_connected(&single).unwrap());
        assert_eq!(g.is_strongly_connected(&BTreeSet::new()), Err(Error::EmptySet));
    }

    /// Independent oracle: full reachability matrix by Floyd-Warshall style
    /// closure, restricted to a vertex subset.
    fn oracle_strongly_connected(g: &Digraph, set: &BTreeSet<usize>) -> bool {
        let vs: Vec<usize> = set.iter().copied().collect();
        let k = vs.len();
        let mut reach = vec![vec![false; k]; k];
        for i in 0..k {
            reach[i][i] = true;
            for j in 0..k {
                if g.has_arc(vs[i], vs[j]) {
                    reach[i][j] = true;
                }
            }
        }
        for mid in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if reach[i][mid] && reach[mid][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..k).all(|i| (0..k).all(|j| reach[i][j]))
    }

    #[test]
    fn strong_connectivity_matches_matrix_oracle_exhaustively() {
        // All digraphs would be 2^(n(n-1)); sample arc sets densely instead,
        // but sweep every nonempty subset of each sampled graph.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5usize {
            for _ in 0..40 {
                let mut g = Digraph::new(n);
                for u in 0..n {
                    for v in 0..n {
                        if u != v && rng.gen_bool(0.4) {
                            g.add_arc(u, v).unwrap();
                        }
                    }
                }
                for mask in 1u32..(1 << n) {
                    let set: BTreeSet<usize> =
                        (0..n).filter(|i| mask & (1 << i) != 0).collect();
                    assert_eq!(
                        g.is_strongly_connected(&set).unwrap(),
                        oracle_strongly_connected(&g, &set),
                        "n={n} mask={mask:b}"
                    );
                }
            }
        }
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let g = cycle(3);
        let text = g.to_text();
        assert_eq!(Digraph::parse(&text).unwrap(), g);

        let bad = "3 2\n0 1\n0 1\n";
        match Digraph::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = "2 1\n0 3\n";
        match Digraph::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = "2 2\n0 1\n";
        assert!(matches!(Digraph::parse(bad), Err(Error::Parse { .. })));
    }
}
