//! Canonical forms, automorphism groups and vertex orbits for small graphs.
//!
//! Graphlets are at most [`MAX_GRAPHLET_NODES`] nodes, where exhaustive
//! permutation search is fast and dependency-free. The canonical form of a
//! graph is the vertex order maximizing the row-major flattened adjacency
//! encoding (2-bit `(out, in)` cells), so denser rows come first.

use crate::error::{Error, Result};
use crate::graph::{ConnectionType, Graph, NodeId};

/// Hard structural cap on graphlet size.
pub const MAX_GRAPHLET_NODES: usize = 8;

/// Default generation limit per directedness; beyond this, exhaustive
/// enumeration of the graphlet space is unreasonable.
pub fn default_max_k(directed: bool) -> usize {
    if directed {
        5
    } else {
        8
    }
}

/// A graphlet candidate: adjacency matrix over connection types, no
/// self-loops, at most [`MAX_GRAPHLET_NODES`] nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    size: u8,
    directed: bool,
    cells: [u8; MAX_GRAPHLET_NODES * MAX_GRAPHLET_NODES],
}

impl SmallGraph {
    pub fn empty(size: usize, directed: bool) -> SmallGraph {
        assert!((1..=MAX_GRAPHLET_NODES).contains(&size));
        SmallGraph {
            size: size as u8,
            directed,
            cells: [0; MAX_GRAPHLET_NODES * MAX_GRAPHLET_NODES],
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size as usize
    }

    #[inline]
    pub fn directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> ConnectionType {
        debug_assert!(i < self.size() && j < self.size());
        ConnectionType::from_bits(self.cells[i * MAX_GRAPHLET_NODES + j])
    }

    /// Sets the connection from `i` to `j`; the mirror cell is kept
    /// consistent. Undirected graphs only accept `None` and `Both`.
    pub fn set(&mut self, i: usize, j: usize, ct: ConnectionType) {
        assert!(i != j, "graphlets have no self-loops");
        assert!(i < self.size() && j < self.size());
        if !self.directed {
            assert!(
                matches!(ct, ConnectionType::None | ConnectionType::Both),
                "undirected cells are None or Both"
            );
        }
        self.cells[i * MAX_GRAPHLET_NODES + j] = ct.bits();
        self.cells[j * MAX_GRAPHLET_NODES + i] = ct.reversed().bits();
    }

    /// Adds an undirected edge.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.set(i, j, ConnectionType::Both);
    }

    /// Adds a directed edge `i -> j`, upgrading to `Both` if the reverse
    /// edge is already present.
    pub fn add_arc(&mut self, i: usize, j: usize) {
        assert!(self.directed, "add_arc requires a directed graph");
        assert!(i != j, "graphlets have no self-loops");
        let merged = self.get(i, j).bits() | ConnectionType::Out.bits();
        self.set(i, j, ConnectionType::from_bits(merged));
    }

    /// Row-major flattened adjacency encoding: 2 bits per cell including the
    /// all-zero diagonal. Graphs of equal size are isomorphic iff the maxima
    /// of this encoding over all vertex permutations are equal.
    pub fn encoding(&self) -> u128 {
        let s = self.size();
        let mut code = 0u128;
        for i in 0..s {
            for j in 0..s {
                code = (code << 2) | self.cells[i * MAX_GRAPHLET_NODES + j] as u128;
            }
        }
        code
    }

    /// Row-major cell values as a digit string, e.g. `"033303330"` for the
    /// undirected triangle. Used in text serializations.
    pub fn digits(&self) -> String {
        let s = self.size();
        let mut out = String::with_capacity(s * s);
        for i in 0..s {
            for j in 0..s {
                out.push(char::from(b'0' + self.cells[i * MAX_GRAPHLET_NODES + j]));
            }
        }
        out
    }

    /// Parses the output of [`SmallGraph::digits`].
    pub fn from_digits(digits: &str, directed: bool) -> Result<SmallGraph> {
        let len = digits.len();
        let size = (1..=MAX_GRAPHLET_NODES)
            .find(|s| s * s == len)
            .ok_or_else(|| Error::InvalidInput(format!("matrix digit string of length {len} is not square")))?;
        let mut g = SmallGraph::empty(size, directed);
        let bytes = digits.as_bytes();
        for i in 0..size {
            for j in 0..size {
                let b = bytes[i * size + j];
                if !(b'0'..=b'3').contains(&b) {
                    return Err(Error::InvalidInput(format!("invalid matrix digit '{}'", b as char)));
                }
                g.cells[i * MAX_GRAPHLET_NODES + j] = b - b'0';
            }
        }
        // validate symmetry and directedness constraints
        for i in 0..size {
            if g.cells[i * MAX_GRAPHLET_NODES + i] != 0 {
                return Err(Error::InvalidInput("self-loop in matrix".into()));
            }
            for j in 0..size {
                if g.get(i, j) != g.get(j, i).reversed() {
                    return Err(Error::InvalidInput("inconsistent mirror cells".into()));
                }
                if !directed && !matches!(g.get(i, j), ConnectionType::None | ConnectionType::Both) {
                    return Err(Error::InvalidInput("directed cell in undirected matrix".into()));
                }
            }
        }
        Ok(g)
    }

    /// The graph with vertex `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SmallGraph {
        let s = self.size();
        debug_assert_eq!(perm.len(), s);
        let mut out = SmallGraph::empty(s, self.directed);
        for i in 0..s {
            for j in 0..s {
                if i != j {
                    out.cells[perm[i] * MAX_GRAPHLET_NODES + perm[j]] =
                        self.cells[i * MAX_GRAPHLET_NODES + j];
                }
            }
        }
        out
    }

    /// Adds one vertex connected to the existing vertices by `pattern`
    /// (pattern[a] = connection from the new vertex to vertex `a`).
    pub fn extended(&self, pattern: &[ConnectionType]) -> SmallGraph {
        let s = self.size();
        debug_assert_eq!(pattern.len(), s);
        let mut out = SmallGraph::empty(s + 1, self.directed);
        out.cells[..].copy_from_slice(&self.cells);
        out.size = (s + 1) as u8;
        for (a, &ct) in pattern.iter().enumerate() {
            if ct.is_connected() {
                out.set(s, a, ct);
            }
        }
        out
    }

    /// Induced subgraph of `g` on `verts`, position i = verts[i].
    pub fn from_graph(g: &Graph, verts: &[NodeId]) -> SmallGraph {
        let s = verts.len();
        let mut out = SmallGraph::empty(s, g.directed());
        for i in 0..s {
            for j in (i + 1)..s {
                let ct = g.connection_type(verts[i], verts[j]);
                if ct.is_connected() {
                    out.set(i, j, ct);
                }
            }
        }
        out
    }

    /// Materializes the graphlet as a full [`Graph`] (labels `"0".."s-1"`).
    pub fn to_graph(&self) -> Graph {
        let s = self.size();
        let mut edges = Vec::new();
        for i in 0..s {
            for j in 0..s {
                if i == j {
                    continue;
                }
                match self.get(i, j) {
                    ConnectionType::Out => edges.push((i as NodeId, j as NodeId)),
                    ConnectionType::Both if i < j => {
                        edges.push((i as NodeId, j as NodeId));
                        if self.directed {
                            edges.push((j as NodeId, i as NodeId));
                        }
                    }
                    _ => {}
                }
            }
        }
        Graph::from_edges(self.directed, s, &edges)
    }

    /// Weak connectivity (direction ignored).
    pub fn is_connected(&self) -> bool {
        let s = self.size();
        if s == 0 {
            return false;
        }
        let mut seen = [false; MAX_GRAPHLET_NODES];
        let mut stack = [0usize; MAX_GRAPHLET_NODES];
        let mut top = 1;
        seen[0] = true;
        let mut count = 1;
        while top > 0 {
            top -= 1;
            let v = stack[top];
            #[allow(clippy::needless_range_loop)]
            for u in 0..s {
                if !seen[u] && u != v && self.get(v, u).is_connected() {
                    seen[u] = true;
                    count += 1;
                    stack[top] = u;
                    top += 1;
                }
            }
        }
        count == s
    }

    /// Per-vertex `(mutual, out, in)` connection counts; invariant under
    /// automorphisms.
    fn signature(&self, v: usize) -> (u8, u8, u8) {
        let mut both = 0;
        let mut out = 0;
        let mut inn = 0;
        for u in 0..self.size() {
            match self.get(v, u) {
                ConnectionType::Both => both += 1,
                ConnectionType::Out => out += 1,
                ConnectionType::In => inn += 1,
                ConnectionType::None => {}
            }
        }
        (both, out, inn)
    }
}

/// Identifier of an isomorphism class: equal keys iff isomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub size: u8,
    pub directed: bool,
    pub code: u128,
}

/// Canonical form: the class key plus a permutation mapping the input graph
/// onto its canonical representative (`perm[i]` = canonical position of
/// input vertex `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub perm: Vec<usize>,
}

/// Automorphism equivalence classes of vertex positions. Classes list their
/// members ascending and are ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub classes: Vec<Vec<usize>>,
}

impl OrbitPartition {
    /// Index of the class containing `pos`.
    pub fn class_of(&self, pos: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&pos))
            .expect("position not covered by orbit partition")
    }
}

struct CanonSearch<'a> {
    g: &'a SmallGraph,
    size: usize,
    chosen: Vec<usize>,
    used: [bool; MAX_GRAPHLET_NODES],
    order: Vec<usize>,
    best_code: u128,
    best_perm: Vec<usize>,
}

impl<'a> CanonSearch<'a> {
    /// Encoding where cells between already-placed vertices take their real
    /// value and every other off-diagonal cell takes the maximum. An upper
    /// bound for every completion of the current partial placement.
    fn optimistic_code(&self) -> u128 {
        let s = self.size;
        let d = self.chosen.len();
        let mut code = 0u128;
        for i in 0..s {
            for j in 0..s {
                let cell = if i == j {
                    0
                } else if i < d && j < d {
                    self.g.get(self.chosen[i], self.chosen[j]).bits()
                } else {
                    0b11
                };
                code = (code << 2) | cell as u128;
            }
        }
        code
    }

    fn exact_code(&self) -> u128 {
        let s = self.size;
        let mut code = 0u128;
        for i in 0..s {
            for j in 0..s {
                let cell = if i == j {
                    0
                } else {
                    self.g.get(self.chosen[i], self.chosen[j]).bits()
                };
                code = (code << 2) | cell as u128;
            }
        }
        code
    }

    fn descend(&mut self) {
        if self.chosen.len() == self.size {
            let code = self.exact_code();
            if code > self.best_code || self.best_perm.is_empty() {
                self.best_code = code;
                let mut perm = vec![0usize; self.size];
                for (pos, &v) in self.chosen.iter().enumerate() {
                    perm[v] = pos;
                }
                self.best_perm = perm;
            }
            return;
        }
        if !self.best_perm.is_empty() && self.optimistic_code() < self.best_code {
            return;
        }
        for idx in 0..self.size {
            let v = self.order[idx];
            if self.used[v] {
                continue;
            }
            self.used[v] = true;
            self.chosen.push(v);
            self.descend();
            self.chosen.pop();
            self.used[v] = false;
        }
    }
}

/// Canonical form by exhaustive permutation search with signature-ordered
/// candidates and optimistic-bound pruning. Deterministic: relabelings of
/// the same graph always produce the same key.
pub fn canonical_form(g: &SmallGraph) -> CanonicalForm {
    let s = g.size();
    let mut order: Vec<usize> = (0..s).collect();
    // denser vertices first so the bound tightens early
    order.sort_by_key(|&v| std::cmp::Reverse(g.signature(v)));
    let mut search = CanonSearch {
        g,
        size: s,
        chosen: Vec::with_capacity(s),
        used: [false; MAX_GRAPHLET_NODES],
        order,
        best_code: 0,
        best_perm: Vec::new(),
    };
    search.descend();
    CanonicalForm {
        key: CanonicalKey {
            size: s as u8,
            directed: g.directed(),
            code: search.best_code,
        },
        perm: search.best_perm,
    }
}

/// All permutations fixing the graph, identity included, in lexicographic
/// order. Backtracking with signature pruning.
pub fn automorphisms(g: &SmallGraph) -> Vec<Vec<usize>> {
    let s = g.size();
    let sigs: Vec<(u8, u8, u8)> = (0..s).map(|v| g.signature(v)).collect();
    let mut result = Vec::new();
    let mut image = vec![usize::MAX; s];
    let mut used = [false; MAX_GRAPHLET_NODES];

    fn descend(
        g: &SmallGraph,
        sigs: &[(u8, u8, u8)],
        pos: usize,
        image: &mut Vec<usize>,
        used: &mut [bool; MAX_GRAPHLET_NODES],
        result: &mut Vec<Vec<usize>>,
    ) {
        let s = g.size();
        if pos == s {
            result.push(image.clone());
            return;
        }
        for target in 0..s {
            if used[target] || sigs[pos] != sigs[target] {
                continue;
            }
            let consistent = (0..pos).all(|earlier| g.get(pos, earlier) == g.get(target, image[earlier]));
            if !consistent {
                continue;
            }
            image[pos] = target;
            used[target] = true;
            descend(g, sigs, pos + 1, image, used, result);
            used[target] = false;
            image[pos] = usize::MAX;
        }
    }

    descend(g, &sigs, 0, &mut image, &mut used, &mut result);
    result
}

/// Orbit partition induced by the automorphism group.
pub fn vertex_orbits(g: &SmallGraph) -> OrbitPartition {
    let s = g.size();
    let mut parent: Vec<usize> = (0..s).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for auto in automorphisms(g) {
        for (i, &img) in auto.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, img));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root: Vec<Option<usize>> = vec![None; s];
    for v in 0..s {
        let root = find(&mut parent, v);
        match class_of_root[root] {
            Some(c) => classes[c].push(v),
            None => {
                class_of_root[root] = Some(classes.len());
                classes.push(vec![v]);
            }
        }
    }
    OrbitPartition { classes }
}
