//! Subgraph census: enumerate every induced occurrence of a graphlet set in
//! a network, accumulating per-graphlet frequencies and the per-node orbit
//! frequency matrix.
//!
//! Two engines produce the same matrix: the g-trie matcher (the fast path)
//! and an ESU-style enumerator used as an independent oracle. Occurrences
//! are identified by vertex set; matching is induced, so connection types
//! must equal the pattern exactly.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::graphlets::GraphletSet;
use crate::gtrie::GTrie;
use crate::iso::{canonical_form, SmallGraph};

/// The n x m matrix of per-node, per-orbit occurrence counts, plus the
/// per-graphlet totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitFrequencyMatrix {
    node_count: usize,
    orbit_count: usize,
    counts: Vec<u64>,
    graphlet_freqs: Vec<u64>,
}

impl OrbitFrequencyMatrix {
    fn zeros(node_count: usize, orbit_count: usize, graphlet_count: usize) -> Self {
        OrbitFrequencyMatrix {
            node_count,
            orbit_count,
            counts: vec![0; node_count * orbit_count],
            graphlet_freqs: vec![0; graphlet_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    #[inline]
    pub fn get(&self, node: NodeId, orbit: usize) -> u64 {
        self.counts[node as usize * self.orbit_count + orbit]
    }

    /// Graphlet degree vector of a node: its row of the matrix.
    pub fn gdv(&self, node: NodeId) -> &[u64] {
        let m = self.orbit_count;
        &self.counts[node as usize * m..(node as usize + 1) * m]
    }

    pub fn graphlet_freqs(&self) -> &[u64] {
        &self.graphlet_freqs
    }

    pub fn freq(&self, graphlet: usize) -> u64 {
        self.graphlet_freqs[graphlet]
    }

    fn merge(&mut self, other: &OrbitFrequencyMatrix) -> Result<()> {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a = a.checked_add(*b).ok_or(Error::Overflow)?;
        }
        for (a, b) in self.graphlet_freqs.iter_mut().zip(&other.graphlet_freqs) {
            *a = a.checked_add(*b).ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    /// CSV: `node,orbit0..orbit{m-1}`, one row per node with original
    /// labels. `header` lines (already `#`-prefixed) are written first.
    pub fn write_fr_csv<W: Write>(&self, mut w: W, g: &Graph, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(w, "{line}")?;
        }
        write!(w, "node")?;
        for j in 0..self.orbit_count {
            write!(w, ",orbit{j}")?;
        }
        writeln!(w)?;
        for u in 0..self.node_count {
            write!(w, "{}", g.label(u as NodeId))?;
            for j in 0..self.orbit_count {
                write!(w, ",{}", self.counts[u * self.orbit_count + j])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// CSV: `graphlet_id,canonical_key,frequency` with the row-major matrix
    /// digits as the key.
    pub fn write_freq_csv<W: Write>(&self, mut w: W, set: &GraphletSet, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(w, "{line}")?;
        }
        writeln!(w, "graphlet_id,canonical_key,frequency")?;
        for (gi, g) in set.graphlets().iter().enumerate() {
            writeln!(w, "{gi},{},{}", g.graph.digits(), self.graphlet_freqs[gi])?;
        }
        Ok(())
    }
}

struct TrieMatcher<'a> {
    g: &'a Graph,
    trie: &'a GTrie,
    matched: Vec<NodeId>,
    acc: OrbitFrequencyMatrix,
}

impl<'a> TrieMatcher<'a> {
    fn new(g: &'a Graph, trie: &'a GTrie) -> Self {
        let set = trie.set();
        TrieMatcher {
            g,
            trie,
            matched: Vec::with_capacity(trie.k()),
            acc: OrbitFrequencyMatrix::zeros(g.node_count(), set.orbit_count(), set.len()),
        }
    }

    fn visit(&mut self, idx: usize) {
        let node = &self.trie.nodes[idx];
        if let Some(ci) = &node.counting {
            let ok = ci
                .check_final
                .iter()
                .all(|&(a, b)| self.matched[a] < self.matched[b]);
            if ok {
                self.acc.graphlet_freqs[ci.graphlet] += 1;
                let m = self.acc.orbit_count;
                for (p, &v) in self.matched.iter().enumerate() {
                    self.acc.counts[v as usize * m + ci.orbit_ids[p]] += 1;
                }
            }
        }
        for &child_idx in &node.children {
            self.descend_child(child_idx);
        }
    }

    fn descend_child(&mut self, child_idx: usize) {
        let child = &self.trie.nodes[child_idx];
        let depth = child.depth;
        // candidates must neighbor a matched vertex; scan from the matched
        // vertex with the smallest neighborhood among the connected cells
        let mut pivot = usize::MAX;
        let mut best = usize::MAX;
        for (a, ct) in child.pattern.iter().enumerate() {
            if ct.is_connected() {
                let d = self.g.degree(self.matched[a]);
                if d < best {
                    best = d;
                    pivot = a;
                }
            }
        }
        debug_assert!(pivot != usize::MAX, "trie pattern must touch the prefix");

        let anchor = self.matched[pivot];
        for &u in self.g.neighbors(anchor) {
            if self.matched.contains(&u) {
                continue;
            }
            let pattern_ok = child
                .pattern
                .iter()
                .enumerate()
                .all(|(a, &ct)| self.g.connection_type(u, self.matched[a]) == ct);
            if !pattern_ok {
                continue;
            }
            let conds_ok = child.check_here.iter().all(|&(a, b)| {
                let va = if a == depth { u } else { self.matched[a] };
                let vb = if b == depth { u } else { self.matched[b] };
                va < vb
            });
            if !conds_ok {
                continue;
            }
            self.matched.push(u);
            self.visit(child_idx);
            self.matched.pop();
        }
    }
}

/// Census over the g-trie, sequential.
pub fn gtrie_census(g: &Graph, trie: &GTrie) -> Result<OrbitFrequencyMatrix> {
    gtrie_census_parallel(g, trie, 1)
}

/// Census over the g-trie with `workers` threads. Root vertices are
/// partitioned by stride; each worker accumulates privately and the
/// accumulators are summed, so the result is identical for any worker
/// count.
pub fn gtrie_census_parallel(g: &Graph, trie: &GTrie, workers: usize) -> Result<OrbitFrequencyMatrix> {
    if g.directed() != trie.directed() {
        return Err(Error::DirectednessMismatch {
            graph_directed: g.directed(),
            other_directed: trie.directed(),
        });
    }
    let n = g.node_count();
    let workers = workers.max(1).min(n.max(1));

    // per-worker increments are single enumeration steps, so only the merge
    // of worker accumulators needs checked arithmetic
    let run_worker = |worker: usize| -> OrbitFrequencyMatrix {
        let mut matcher = TrieMatcher::new(g, trie);
        for v in ((worker as u32)..n as u32).step_by(workers) {
            for &root in &trie.roots {
                matcher.matched.push(v);
                matcher.visit(root);
                matcher.matched.pop();
            }
        }
        matcher.acc
    };

    if workers == 1 {
        return Ok(run_worker(0));
    }

    let run_worker = &run_worker;
    let parts: Vec<OrbitFrequencyMatrix> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| scope.spawn(move || run_worker(w)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("census worker panicked")).collect()
    });

    let mut iter = parts.into_iter();
    let mut acc = iter.next().expect("at least one worker");
    for part in iter {
        acc.merge(&part)?;
    }
    Ok(acc)
}

/// ESU-style census: enumerates every weakly connected induced subgraph of
/// sizes `2..=k` exactly once by exclusive-neighborhood extension, then
/// classifies each occurrence by canonical form. Independent of the g-trie
/// matching path; used as the correctness oracle.
pub fn esu_census(g: &Graph, k: usize, set: &GraphletSet) -> Result<OrbitFrequencyMatrix> {
    if g.directed() != set.directed() {
        return Err(Error::DirectednessMismatch {
            graph_directed: g.directed(),
            other_directed: set.directed(),
        });
    }
    if set.k() != k {
        return Err(Error::InvalidInput(format!(
            "graphlet set was generated for k={}, census requested k={k}",
            set.k()
        )));
    }

    let n = g.node_count();
    let mut state = EsuState {
        g,
        set,
        k,
        acc: OrbitFrequencyMatrix::zeros(n, set.orbit_count(), set.len()),
        memo: HashMap::new(),
        marked: vec![0u32; n],
        epoch: 0,
        root: 0,
    };

    for v in 0..n as NodeId {
        state.epoch += 1;
        state.root = v;
        state.marked[v as usize] = state.epoch;
        for &u in g.neighbors(v) {
            state.marked[u as usize] = state.epoch;
        }
        let ext: Vec<NodeId> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        let mut sub = vec![v];
        state.extend(&mut sub, ext)?;
    }
    Ok(state.acc)
}

struct EsuState<'a> {
    g: &'a Graph,
    set: &'a GraphletSet,
    k: usize,
    acc: OrbitFrequencyMatrix,
    /// (size, raw encoding) -> (graphlet index, orbit id per position).
    memo: HashMap<(u8, u128), (usize, Vec<usize>)>,
    marked: Vec<u32>,
    epoch: u32,
    root: NodeId,
}

impl<'a> EsuState<'a> {
    fn extend(&mut self, sub: &mut Vec<NodeId>, mut ext: Vec<NodeId>) -> Result<()> {
        while let Some(w) = ext.pop() {
            sub.push(w);
            self.record(sub)?;
            if sub.len() < self.k {
                let mut ext2 = ext.clone();
                let mut added = Vec::new();
                for &u in self.g.neighbors(w) {
                    if u > self.root && self.marked[u as usize] != self.epoch {
                        self.marked[u as usize] = self.epoch;
                        added.push(u);
                    }
                }
                ext2.extend(added.iter().copied());
                self.extend(sub, ext2)?;
                for &u in &added {
                    self.marked[u as usize] = 0;
                }
            }
            sub.pop();
        }
        Ok(())
    }

    fn record(&mut self, sub: &[NodeId]) -> Result<()> {
        let mut verts: [NodeId; 8] = [0; 8];
        let s = sub.len();
        verts[..s].copy_from_slice(sub);
        let verts = &mut verts[..s];
        verts.sort_unstable();

        let small = SmallGraph::from_graph(self.g, verts);
        let enc = (s as u8, small.encoding());
        let (gi, orbit_by_pos) = match self.memo.get(&enc) {
            Some(hit) => hit.clone(),
            None => {
                let cf = canonical_form(&small);
                let gi = self.set.index_of(&cf.key).ok_or_else(|| {
                    Error::InvalidInput("induced subgraph not covered by the graphlet set".into())
                })?;
                let graphlet = &self.set.graphlets()[gi];
                let orbit_by_pos: Vec<usize> =
                    (0..s).map(|i| graphlet.orbit_ids[cf.perm[i]]).collect();
                self.memo.insert(enc, (gi, orbit_by_pos.clone()));
                (gi, orbit_by_pos)
            }
        };

        self.acc.graphlet_freqs[gi] = self.acc.graphlet_freqs[gi].checked_add(1).ok_or(Error::Overflow)?;
        let m = self.acc.orbit_count;
        for (i, &v) in verts.iter().enumerate() {
            let slot = &mut self.acc.counts[v as usize * m + orbit_by_pos[i]];
            *slot = slot.checked_add(1).ok_or(Error::Overflow)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ConnectionType;
    use crate::graphlets::generate;
    use crate::random;
    use itertools::Itertools;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn trie(k: usize, directed: bool) -> GTrie {
        GTrie::build(generate(k, directed).unwrap())
    }

    /// Fully independent reference: enumerate every vertex subset of sizes
    /// 2..=k, keep the weakly connected ones, classify by canonical form.
    fn subset_census(g: &Graph, k: usize, set: &GraphletSet) -> OrbitFrequencyMatrix {
        let n = g.node_count();
        let mut acc = OrbitFrequencyMatrix::zeros(n, set.orbit_count(), set.len());
        for s in 2..=k {
            for combo in (0..n as NodeId).combinations(s) {
                let small = SmallGraph::from_graph(g, &combo);
                if !small.is_connected() {
                    continue;
                }
                let cf = canonical_form(&small);
                let gi = set.index_of(&cf.key).unwrap();
                let graphlet = &set.graphlets()[gi];
                acc.graphlet_freqs[gi] += 1;
                for (i, &v) in combo.iter().enumerate() {
                    acc.counts[v as usize * set.orbit_count() + graphlet.orbit_ids[cf.perm[i]]] += 1;
                }
            }
        }
        acc
    }

    /// Column-sum consistency: per orbit class, the column sum equals the
    /// graphlet frequency times the class size.
    fn assert_column_sums(m: &OrbitFrequencyMatrix, set: &GraphletSet) {
        for (gi, g) in set.graphlets().iter().enumerate() {
            for class in &g.orbits.classes {
                let orbit = g.orbit_ids[class[0]];
                let col: u64 = (0..m.node_count()).map(|u| m.get(u as NodeId, orbit)).sum();
                assert_eq!(col, m.freq(gi) * class.len() as u64, "graphlet {gi} orbit {orbit}");
            }
        }
    }

    fn find_graphlet(set: &GraphletSet, g: &SmallGraph) -> usize {
        set.index_of(&canonical_form(g).key).unwrap()
    }

    #[test]
    fn triangle_census() {
        let t = trie(3, false);
        let set = t.set();
        let g = Graph::from_edges(false, 3, &[(0, 1), (1, 2), (0, 2)]);
        let m = gtrie_census(&g, &t).unwrap();

        let mut tri = SmallGraph::empty(3, false);
        tri.add_edge(0, 1);
        tri.add_edge(1, 2);
        tri.add_edge(0, 2);
        let mut path = SmallGraph::empty(3, false);
        path.add_edge(0, 1);
        path.add_edge(1, 2);

        assert_eq!(m.freq(find_graphlet(set, &tri)), 1);
        assert_eq!(m.freq(find_graphlet(set, &path)), 0);
        // per node: edge orbit 2, triangle orbit 1, path orbits 0
        for u in 0..3 {
            assert_eq!(m.gdv(u), &[2, 0, 0, 1]);
        }
        assert_column_sums(&m, set);
    }

    #[test]
    fn star_census() {
        // center 0 with leaves 1,2,3
        let t = trie(3, false);
        let set = t.set();
        let g = Graph::from_edges(false, 4, &[(0, 1), (0, 2), (0, 3)]);
        let m = gtrie_census(&g, &t).unwrap();

        let mut path = SmallGraph::empty(3, false);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        assert_eq!(m.freq(find_graphlet(set, &path)), 3);

        // orbits in generated order: edge=0, path middle=1, path end=2, triangle=3
        assert_eq!(m.gdv(0), &[3, 3, 0, 0]);
        for leaf in 1..4 {
            assert_eq!(m.gdv(leaf), &[1, 0, 2, 0]);
        }
        assert_eq!(m, esu_census(&g, 3, set).unwrap());
    }

    #[test]
    fn feed_forward_loop_census() {
        let t = trie(3, true);
        let set = t.set();
        let g = Graph::from_edges(true, 3, &[(0, 1), (0, 2), (1, 2)]);
        let m = gtrie_census(&g, &t).unwrap();

        let mut ffl = SmallGraph::empty(3, true);
        ffl.add_arc(0, 1);
        ffl.add_arc(0, 2);
        ffl.add_arc(1, 2);
        let ffl_idx = find_graphlet(set, &ffl);
        for gi in set.indices_of_size(3) {
            assert_eq!(m.freq(gi), if gi == ffl_idx { 1 } else { 0 });
        }
        // the three nodes land in three distinct orbits, once each
        let size3_orbits: Vec<usize> = (0..3)
            .map(|u| {
                let hits: Vec<usize> = set.indices_of_size(3)
                    .flat_map(|gi| set.graphlets()[gi].orbit_ids.clone())
                    .unique()
                    .filter(|&j| m.get(u, j) == 1)
                    .collect();
                assert_eq!(hits.len(), 1);
                hits[0]
            })
            .collect();
        assert_eq!(size3_orbits.iter().unique().count(), 3);
        assert_eq!(m, esu_census(&g, 3, set).unwrap());
    }

    #[test]
    fn five_cycle_paths() {
        let t = trie(3, false);
        let set = t.set();
        let g = Graph::from_edges(false, 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let m = gtrie_census(&g, &t).unwrap();
        let mut path = SmallGraph::empty(3, false);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        let mut tri = SmallGraph::empty(3, false);
        tri.add_edge(0, 1);
        tri.add_edge(1, 2);
        tri.add_edge(0, 2);
        assert_eq!(m.freq(find_graphlet(set, &path)), 5);
        assert_eq!(m.freq(find_graphlet(set, &tri)), 0);
    }

    #[test]
    fn single_directed_edge_size2_orbits() {
        let t = trie(2, true);
        let g = Graph::from_edges(true, 2, &[(0, 1)]);
        let m = gtrie_census(&g, &t).unwrap();
        // orbit 0 = source, orbit 1 = target, orbit 2 = mutual
        assert_eq!(m.gdv(0), &[1, 0, 0]);
        assert_eq!(m.gdv(1), &[0, 1, 0]);
    }

    #[test]
    fn cliques_found_exactly_once() {
        for n in [4usize, 5] {
            let edges: Vec<(NodeId, NodeId)> = (0..n as NodeId)
                .flat_map(|i| ((i + 1)..n as NodeId).map(move |j| (i, j)))
                .collect();
            let g = Graph::from_edges(false, n, &edges);
            let t = trie(n, false);
            let m = gtrie_census(&g, &t).unwrap();
            let mut clique = SmallGraph::empty(n, false);
            for i in 0..n {
                for j in (i + 1)..n {
                    clique.add_edge(i, j);
                }
            }
            assert_eq!(m.freq(find_graphlet(t.set(), &clique)), 1);
        }
    }

    #[test]
    fn isolated_node_has_zero_gdv() {
        let t = trie(3, false);
        let g = Graph::from_edges(false, 4, &[(0, 1), (1, 2)]);
        let m = gtrie_census(&g, &t).unwrap();
        assert!(m.gdv(3).iter().all(|&c| c == 0));
    }

    #[test]
    fn gdv_is_isomorphism_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random::gnm_digraph(12, 30, &mut rng);
        let t = trie(3, true);
        let m1 = gtrie_census(&g, &t).unwrap();

        // relabel nodes by a rotation
        let n = g.node_count() as NodeId;
        let mut edges = Vec::new();
        for u in 0..n {
            for &(v, ct) in g.conn_row(u) {
                if matches!(ct, ConnectionType::Out | ConnectionType::Both) {
                    edges.push(((u + 1) % n, (v + 1) % n));
                }
            }
        }
        let h = Graph::from_edges(true, n as usize, &edges);
        let m2 = gtrie_census(&h, &t).unwrap();

        let mut rows1: Vec<Vec<u64>> = (0..n).map(|u| m1.gdv(u).to_vec()).collect();
        let mut rows2: Vec<Vec<u64>> = (0..n).map(|u| m2.gdv(u).to_vec()).collect();
        rows1.sort();
        rows2.sort();
        assert_eq!(rows1, rows2);
    }

    #[test]
    fn engines_agree_with_subset_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..12 {
            let directed = trial % 2 == 0;
            let n = rng.gen_range(6..=11);
            let max_edges = if directed { n * (n - 1) } else { n * (n - 1) / 2 };
            let m_edges = rng.gen_range(n..=(max_edges).max(n));
            let g = if directed {
                random::gnm_digraph(n, m_edges, &mut rng)
            } else {
                random::gnm_graph(n, m_edges, &mut rng)
            };
            for k in [3usize, 4] {
                let t = trie(k, directed);
                let reference = subset_census(&g, k, t.set());
                let fast = gtrie_census(&g, &t).unwrap();
                let oracle = esu_census(&g, k, t.set()).unwrap();
                assert_eq!(fast, reference, "gtrie vs subsets: n={n} k={k} directed={directed}");
                assert_eq!(oracle, reference, "esu vs subsets: n={n} k={k} directed={directed}");
                assert_column_sums(&fast, t.set());
            }
        }
    }

    #[test]
    fn parallel_census_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let g = random::gnm_digraph(40, 160, &mut rng);
        let t = trie(4, true);
        let sequential = gtrie_census(&g, &t).unwrap();
        for workers in [2, 3, 8] {
            assert_eq!(gtrie_census_parallel(&g, &t, workers).unwrap(), sequential);
        }
    }

    #[test]
    fn directedness_mismatch_is_an_error() {
        let g = Graph::from_edges(false, 3, &[(0, 1)]);
        let t = trie(3, true);
        assert!(matches!(
            gtrie_census(&g, &t),
            Err(Error::DirectednessMismatch { .. })
        ));
        assert!(matches!(
            esu_census(&g, 3, t.set()),
            Err(Error::DirectednessMismatch { .. })
        ));
    }
}
