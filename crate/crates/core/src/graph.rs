//! Input networks: edge-list parsing, constant-time connection queries and
//! basic directed-graph statistics.
//!
//! Nodes are dense indices `0..n`; the original input labels are kept
//! alongside for output. A [`Graph`] is immutable once built and can be
//! shared freely between census workers.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Connection between an ordered pair of nodes.
///
/// Values are 2-bit cells `(out, in)`: bit 1 set when the queried node has an
/// edge towards the other, bit 0 set for the reverse edge. Undirected graphs
/// only use `None` and `Both` (an undirected edge reads as `Both` from either
/// endpoint).
#[repr(u8)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnectionType {
    None = 0b00,
    In = 0b01,
    Out = 0b10,
    Both = 0b11,
}

impl ConnectionType {
    #[inline]
    pub fn from_bits(bits: u8) -> ConnectionType {
        match bits & 0b11 {
            0b00 => ConnectionType::None,
            0b01 => ConnectionType::In,
            0b10 => ConnectionType::Out,
            _ => ConnectionType::Both,
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self as u8
    }

    /// The same connection seen from the other endpoint.
    #[inline]
    pub fn reversed(self) -> ConnectionType {
        match self {
            ConnectionType::In => ConnectionType::Out,
            ConnectionType::Out => ConnectionType::In,
            other => other,
        }
    }

    #[inline]
    pub fn is_connected(self) -> bool {
        self != ConnectionType::None
    }
}

/// Above this node count the dense n x n lookup table is skipped and
/// connection queries fall back to binary search in sorted rows.
const DENSE_LIMIT: usize = 4096;

/// An immutable network with dense node indices.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    /// Neighbors in any direction, sorted ascending, each exactly once.
    neighbors: Vec<Vec<NodeId>>,
    /// Sorted `(neighbor, connection)` rows for the lookup fallback.
    conn_rows: Vec<Vec<(NodeId, ConnectionType)>>,
    /// Dense n*n connection table, present when n <= DENSE_LIMIT.
    dense: Option<Vec<u8>>,
    /// Directed: number of ordered edges; undirected: number of edges.
    edge_count: u64,
    /// Directed only: ordered edges whose reverse edge also exists.
    reciprocated: u64,
    self_loops_dropped: u64,
    duplicates_dropped: u64,
}

impl Graph {
    /// Parses a whitespace-separated edge list: one `u v [w]` pair per line,
    /// arbitrary string labels, optional ignored weight. Lines starting with
    /// `#` or `%` are comments. Self-loops are dropped (counted), duplicate
    /// edges collapse, and in a directed graph the pair `(u,v)`,`(v,u)`
    /// collapses to a mutual connection.
    pub fn from_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<Graph> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut edges: HashMap<(NodeId, NodeId), ()> = HashMap::new();
        let mut self_loops = 0u64;
        let mut duplicates = 0u64;

        let intern = |tok: &str, labels: &mut Vec<String>, index: &mut HashMap<String, NodeId>| -> NodeId {
            if let Some(&id) = index.get(tok) {
                return id;
            }
            let id = labels.len() as NodeId;
            labels.push(tok.to_string());
            index.insert(tok.to_string(), id);
            id
        };

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let (u, v) = match (tokens.next(), tokens.next()) {
                (Some(u), Some(v)) => (u, v),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected 'u v [w]', got '{trimmed}'"),
                    })
                }
            };
            let ui = intern(u, &mut labels, &mut index);
            let vi = intern(v, &mut labels, &mut index);
            if ui == vi {
                self_loops += 1;
                continue;
            }
            let key = if directed {
                (ui, vi)
            } else {
                (ui.min(vi), ui.max(vi))
            };
            if edges.insert(key, ()).is_some() {
                duplicates += 1;
            }
        }

        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }

        let mut g = Graph::build(directed, labels, edges.into_keys());
        g.self_loops_dropped = self_loops;
        g.duplicates_dropped = duplicates;
        Ok(g)
    }

    pub fn from_path<P: AsRef<Path>>(path: P, directed: bool) -> Result<Graph> {
        let file = File::open(path)?;
        Graph::from_edge_list(BufReader::new(file), directed)
    }

    /// Builds a graph over `n` nodes labeled `"0".."n-1"` from ordered index
    /// pairs. Self-loops and duplicates are dropped like in `from_edge_list`.
    pub fn from_edges(directed: bool, n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut dedup: HashMap<(NodeId, NodeId), ()> = HashMap::new();
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            if u == v {
                continue;
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            dedup.insert(key, ());
        }
        Graph::build(directed, labels, dedup.into_keys())
    }

    fn build(directed: bool, labels: Vec<String>, edges: impl Iterator<Item = (NodeId, NodeId)>) -> Graph {
        let n = labels.len();
        let mut cells: HashMap<(NodeId, NodeId), u8> = HashMap::new();
        let mut edge_count = 0u64;
        for (u, v) in edges {
            edge_count += 1;
            if directed {
                *cells.entry((u, v)).or_insert(0) |= ConnectionType::Out.bits();
                *cells.entry((v, u)).or_insert(0) |= ConnectionType::In.bits();
            } else {
                cells.insert((u, v), ConnectionType::Both.bits());
                cells.insert((v, u), ConnectionType::Both.bits());
            }
        }

        let mut conn_rows: Vec<Vec<(NodeId, ConnectionType)>> = vec![Vec::new(); n];
        for (&(u, v), &bits) in &cells {
            conn_rows[u as usize].push((v, ConnectionType::from_bits(bits)));
        }
        for row in &mut conn_rows {
            row.sort_unstable_by_key(|&(v, _)| v);
        }

        let neighbors = conn_rows
            .iter()
            .map(|row| row.iter().map(|&(v, _)| v).collect())
            .collect();

        let dense = if n <= DENSE_LIMIT {
            let mut table = vec![0u8; n * n];
            for (row, u) in conn_rows.iter().zip(0..) {
                for &(v, ct) in row {
                    table[u as usize * n + v as usize] = ct.bits();
                }
            }
            Some(table)
        } else {
            None
        };

        // a mutual pair holds two reciprocated ordered edges and contributes
        // one Both cell to each endpoint row, so the raw cell count is exact
        let mut reciprocated = 0u64;
        if directed {
            for row in &conn_rows {
                reciprocated += row.iter().filter(|&&(_, ct)| ct == ConnectionType::Both).count() as u64;
            }
        }

        Graph {
            directed,
            labels,
            neighbors,
            conn_rows,
            dense,
            edge_count,
            reciprocated,
            self_loops_dropped: 0,
            duplicates_dropped: 0,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Directed graphs: number of ordered edges (a mutual pair counts as
    /// two). Undirected graphs: number of edges.
    #[inline]
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Neighbors of `u` in any direction, sorted, each exactly once.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[u as usize]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.neighbors[u as usize].len()
    }

    /// Sorted `(neighbor, connection)` row of `u`.
    pub fn conn_row(&self, u: NodeId) -> &[(NodeId, ConnectionType)] {
        &self.conn_rows[u as usize]
    }

    /// Connection from `u` to `v`. Amortized constant time.
    #[inline]
    pub fn connection_type(&self, u: NodeId, v: NodeId) -> ConnectionType {
        if let Some(table) = &self.dense {
            let n = self.labels.len();
            return ConnectionType::from_bits(table[u as usize * n + v as usize]);
        }
        match self.conn_rows[u as usize].binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.conn_rows[u as usize][i].1,
            Err(_) => ConnectionType::None,
        }
    }

    pub fn self_loops_dropped(&self) -> u64 {
        self.self_loops_dropped
    }

    pub fn duplicates_dropped(&self) -> u64 {
        self.duplicates_dropped
    }

    /// Fraction of ordered edges whose reverse edge also exists, in [0,1].
    pub fn reciprocity(&self) -> Result<f64> {
        if !self.directed {
            return Err(Error::ReciprocityUndirected);
        }
        if self.edge_count == 0 {
            return Err(Error::ReciprocityNoEdges);
        }
        Ok(self.reciprocated as f64 / self.edge_count as f64)
    }

    /// Forgets edge direction: `{u,v}` is an edge iff any connection existed.
    /// Labels are preserved. Calling on an undirected graph is a no-op clone.
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut edges = Vec::new();
        for u in 0..self.node_count() as NodeId {
            for &v in self.neighbors(u) {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let mut g = Graph::build(false, self.labels.clone(), edges.into_iter());
        g.self_loops_dropped = self.self_loops_dropped;
        g
    }

    /// Writes a normalized edge list: one `u v` line per stored ordered edge
    /// (mutual pairs appear in both directions; undirected edges once, lower
    /// index first), sorted by index pair, with original labels.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for u in 0..self.node_count() as NodeId {
            for &(v, ct) in self.conn_row(u) {
                let emit = if self.directed {
                    matches!(ct, ConnectionType::Out | ConnectionType::Both)
                } else {
                    u < v
                };
                if emit {
                    writeln!(w, "{} {}", self.labels[u as usize], self.labels[v as usize])?;
                }
            }
        }
        Ok(())
    }
}

/// Label-level structural equality: same directedness, same label set and
/// the same connection between every pair of labels, regardless of the
/// internal index assignment.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        if self.directed != other.directed || self.labels.len() != other.labels.len() {
            return false;
        }
        let index: HashMap<&str, NodeId> = other
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as NodeId))
            .collect();
        for u in 0..self.labels.len() {
            let Some(&ou) = index.get(self.labels[u].as_str()) else {
                return false;
            };
            let row = &self.conn_rows[u];
            if row.len() != other.conn_rows[ou as usize].len() {
                return false;
            }
            for &(v, ct) in row {
                let Some(&ov) = index.get(self.labels[v as usize].as_str()) else {
                    return false;
                };
                if other.connection_type(ou, ov) != ct {
                    return false;
                }
            }
        }
        true
    }
}

impl Eq for Graph {}
