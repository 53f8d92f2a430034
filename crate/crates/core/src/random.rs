//! Seeded random network models for tests, benchmarks and the `rand-net`
//! CLI helper.
//!
//! Three structurally distinct digraph families: uniform sparse digraphs,
//! reciprocal-heavy digraphs (every connection mutual) and DAG-like
//! hierarchies (edges only run from lower to higher node index, so there is
//! no reciprocation and no directed cycle).

use std::collections::HashSet;

use rand::Rng;

use crate::graph::{Graph, NodeId};

/// Uniform digraph with `m` distinct ordered edges (no self-loops).
pub fn gnm_digraph(n: usize, m: usize, rng: &mut impl Rng) -> Graph {
    let max = n * n.saturating_sub(1);
    let m = m.min(max);
    let mut edges = HashSet::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        if u != v {
            edges.insert((u, v));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(true, n, &edges)
}

/// Uniform undirected graph with `m` distinct edges.
pub fn gnm_graph(n: usize, m: usize, rng: &mut impl Rng) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    let m = m.min(max);
    let mut edges = HashSet::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(false, n, &edges)
}

/// Digraph where every connection is a mutual pair: `pairs` distinct node
/// pairs, each contributing both directions.
pub fn reciprocal_digraph(n: usize, pairs: usize, rng: &mut impl Rng) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    let pairs = pairs.min(max);
    let mut chosen = HashSet::with_capacity(pairs);
    while chosen.len() < pairs {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        if u != v {
            chosen.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(NodeId, NodeId)> = chosen
        .into_iter()
        .flat_map(|(u, v)| [(u, v), (v, u)])
        .collect();
    Graph::from_edges(true, n, &edges)
}

/// DAG-like hierarchy: `m` distinct edges, all oriented from lower to
/// higher index.
pub fn dag_digraph(n: usize, m: usize, rng: &mut impl Rng) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    let m = m.min(max);
    let mut edges = HashSet::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(true, n, &edges)
}
