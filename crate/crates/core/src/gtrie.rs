//! The graphlet-trie: a prefix tree over connection patterns.
//!
//! Each trie node at depth `d` stands for vertex `d` of a partially
//! specified graph and stores the connections from that vertex to every
//! ancestor vertex. A root-to-node path therefore spells one small graph;
//! graphlets sharing a leading submatrix share a path prefix, which is what
//! constrains the census search space. Nodes that complete a graphlet are
//! marked for counting and carry the orbit ids of the path positions plus
//! symmetry-breaking conditions that make every occurrence match under
//! exactly one vertex assignment.
//!
//! Isomorphic graphs may appear among non-counting interior nodes; only
//! counting nodes are unique per isomorphism class.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::ConnectionType;
use crate::graphlets::{GraphletSet, NumberedLines};
use crate::iso::{automorphisms, SmallGraph};

/// `(a, b)`: the graph vertex matched at position `a` must precede (by node
/// index) the vertex matched at position `b`.
pub type Condition = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CountingInfo {
    /// Index into the source GraphletSet.
    pub(crate) graphlet: usize,
    /// Global orbit id of each path position `0..=depth`.
    pub(crate) orbit_ids: Vec<usize>,
    /// Full symmetry-breaking condition set for this graphlet.
    pub(crate) conditions: Vec<Condition>,
    /// Conditions not already enforced on the path to this node.
    pub(crate) check_final: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TrieNode {
    pub(crate) depth: usize,
    /// Connection from vertex `depth` to each ancestor `0..depth`.
    pub(crate) pattern: Vec<ConnectionType>,
    pub(crate) children: Vec<usize>,
    pub(crate) counting: Option<CountingInfo>,
    /// Conditions shared by every counting node below (or at) this node
    /// whose positions are all matched here; checked during the descent.
    pub(crate) check_here: Vec<Condition>,
}

/// A graphlet-trie over a [`GraphletSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTrie {
    directed: bool,
    max_depth: usize,
    set: GraphletSet,
    pub(crate) nodes: Vec<TrieNode>,
    pub(crate) roots: Vec<usize>,
}

impl GTrie {
    /// Builds the trie by inserting every graphlet of the set under its
    /// canonical vertex order.
    pub fn build(set: GraphletSet) -> GTrie {
        let mut trie = GTrie {
            directed: set.directed(),
            max_depth: set.k(),
            nodes: Vec::new(),
            roots: Vec::new(),
            set,
        };
        for gi in 0..trie.set.len() {
            trie.insert(gi);
        }
        trie.normalize_preorder();
        trie.compute_checks();
        trie
    }

    fn insert(&mut self, gi: usize) {
        let graphlet = self.set.graphlets()[gi].clone();
        let g = &graphlet.graph;
        let size = g.size();
        let mut current: Option<usize> = None;
        for depth in 0..size {
            let pattern: Vec<ConnectionType> = (0..depth).map(|a| g.get(depth, a)).collect();
            // every vertex of a canonical representative touches the prefix
            debug_assert!(depth == 0 || pattern.iter().any(|ct| ct.is_connected()));
            let siblings = match current {
                None => &self.roots,
                Some(p) => &self.nodes[p].children,
            };
            let found = siblings
                .iter()
                .copied()
                .find(|&c| self.nodes[c].pattern == pattern);
            let idx = match found {
                Some(idx) => idx,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(TrieNode {
                        depth,
                        pattern,
                        children: Vec::new(),
                        counting: None,
                        check_here: Vec::new(),
                    });
                    match current {
                        None => self.roots.push(idx),
                        Some(p) => self.nodes[p].children.push(idx),
                    }
                    idx
                }
            };
            current = Some(idx);
        }
        let leaf = current.expect("graphlet has at least one vertex");
        debug_assert!(self.nodes[leaf].counting.is_none(), "duplicate graphlet insertion");
        self.nodes[leaf].counting = Some(CountingInfo {
            graphlet: gi,
            orbit_ids: graphlet.orbit_ids.clone(),
            conditions: symmetry_conditions(g),
            check_final: Vec::new(),
        });
    }

    /// Rewrites the arena in depth-first preorder so that serialization and
    /// structural comparison are index-stable.
    fn normalize_preorder(&mut self) {
        fn visit(old: &[TrieNode], idx: usize, out: &mut Vec<TrieNode>) -> usize {
            let new_idx = out.len();
            let mut node = old[idx].clone();
            let children = std::mem::take(&mut node.children);
            out.push(node);
            let new_children: Vec<usize> = children.iter().map(|&c| visit(old, c, out)).collect();
            out[new_idx].children = new_children;
            new_idx
        }
        let mut out = Vec::with_capacity(self.nodes.len());
        let roots: Vec<usize> = self.roots.iter().map(|&r| visit(&self.nodes, r, &mut out)).collect();
        self.nodes = out;
        self.roots = roots;
    }

    /// Hoists each condition to the shallowest node where all constrained
    /// positions are matched and the condition holds for every counting node
    /// below, so mismatching branches are pruned early.
    fn compute_checks(&mut self) {
        let n = self.nodes.len();
        let mut common: Vec<Vec<Condition>> = vec![Vec::new(); n];
        // preorder guarantees children have larger indices
        for idx in (0..n).rev() {
            let node = &self.nodes[idx];
            let mut sets: Vec<&[Condition]> = Vec::new();
            if let Some(ci) = &node.counting {
                sets.push(&ci.conditions);
            }
            for &c in &node.children {
                sets.push(&common[c]);
            }
            let mut inter: Vec<Condition> = match sets.first() {
                Some(first) => first
                    .iter()
                    .copied()
                    .filter(|cond| sets[1..].iter().all(|s| s.contains(cond)))
                    .collect(),
                None => Vec::new(),
            };
            inter.sort_unstable();
            common[idx] = inter;
        }

        fn assign(
            nodes: &mut Vec<TrieNode>,
            common: &[Vec<Condition>],
            idx: usize,
            already: &mut Vec<Condition>,
        ) {
            let depth = nodes[idx].depth;
            let here: Vec<Condition> = common[idx]
                .iter()
                .copied()
                .filter(|&(a, b)| a.max(b) <= depth && !already.contains(&(a, b)))
                .collect();
            let added = here.len();
            already.extend(here.iter().copied());
            let final_checks = nodes[idx].counting.as_ref().map(|ci| {
                ci.conditions
                    .iter()
                    .copied()
                    .filter(|c| !already.contains(c))
                    .collect::<Vec<Condition>>()
            });
            if let Some(fc) = final_checks {
                nodes[idx].counting.as_mut().unwrap().check_final = fc;
            }
            nodes[idx].check_here = here;
            let children = nodes[idx].children.clone();
            for c in children {
                assign(nodes, common, c, already);
            }
            already.truncate(already.len() - added);
        }

        let roots = self.roots.clone();
        let mut already = Vec::new();
        for r in roots {
            assign(&mut self.nodes, &common, r, &mut already);
        }
    }

    pub fn set(&self) -> &GraphletSet {
        &self.set
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn k(&self) -> usize {
        self.max_depth
    }

    /// Total number of trie nodes (the virtual root excluded).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of counting nodes per depth.
    pub fn counting_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.max_depth];
        for node in &self.nodes {
            if node.counting.is_some() {
                hist[node.depth] += 1;
            }
        }
        hist
    }

    /// Textual depth-first serialization: the graphlet set, then one line
    /// per node. `deserialize(serialize(t))` is structurally identical.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "graphlet-trie 1 {} {}",
            self.max_depth,
            if self.directed { "directed" } else { "undirected" }
        )?;
        self.set.write_text(&mut w)?;
        writeln!(w, "trie {}", self.nodes.len())?;
        // nodes are stored in preorder, so plain iteration is depth-first
        for node in &self.nodes {
            let pattern: String = if node.pattern.is_empty() {
                "-".into()
            } else {
                node.pattern.iter().map(|ct| char::from(b'0' + ct.bits())).collect()
            };
            match &node.counting {
                None => writeln!(w, "n {} {} -", node.depth, pattern)?,
                Some(ci) => {
                    let orbits: Vec<String> = ci.orbit_ids.iter().map(|o| o.to_string()).collect();
                    let conds: String = if ci.conditions.is_empty() {
                        "-".into()
                    } else {
                        ci.conditions
                            .iter()
                            .map(|&(a, b)| format!("{a}<{b}"))
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    writeln!(
                        w,
                        "n {} {} c {} {} {}",
                        node.depth,
                        pattern,
                        ci.graphlet,
                        orbits.join(","),
                        conds
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<GTrie> {
        let mut lines = NumberedLines::new(r);
        let (lineno, header) = lines.next_data_line()?.ok_or(Error::EmptyInput)?;
        let mut t = header.split_whitespace();
        let bad_header = || Error::Parse {
            line: lineno,
            msg: format!("bad graphlet-trie header '{header}'"),
        };
        if t.next() != Some("graphlet-trie") || t.next() != Some("1") {
            return Err(bad_header());
        }
        let max_depth: usize = t.next().and_then(|s| s.parse().ok()).ok_or_else(bad_header)?;
        let directed = match t.next() {
            Some("directed") => true,
            Some("undirected") => false,
            _ => return Err(bad_header()),
        };

        let set = GraphletSet::read_from(&mut lines)?;
        if set.directed() != directed || set.k() != max_depth {
            return Err(Error::InvalidInput(
                "trie header disagrees with embedded graphlet set".into(),
            ));
        }

        let (lineno, trie_line) = lines.next_data_line()?.ok_or_else(|| Error::Parse {
            line: lines.current_line(),
            msg: "missing trie section".into(),
        })?;
        let node_count: usize = trie_line
            .strip_prefix("trie ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected 'trie <count>', got '{trie_line}'"),
            })?;

        let mut nodes: Vec<TrieNode> = Vec::with_capacity(node_count);
        let mut roots = Vec::new();
        // last node seen at each depth; a node at depth d attaches to it
        let mut last_at_depth: Vec<usize> = Vec::new();
        for _ in 0..node_count {
            let (lineno, line) = lines.next_data_line()?.ok_or_else(|| Error::Parse {
                line: lines.current_line(),
                msg: format!("truncated trie: expected {node_count} node lines"),
            })?;
            let node = parse_node_line(&line, &set, lineno)?;
            let idx = nodes.len();
            if node.depth == 0 {
                roots.push(idx);
            } else {
                let parent = last_at_depth.get(node.depth - 1).copied().ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("node at depth {} has no parent", node.depth),
                })?;
                if nodes[parent].depth + 1 != node.depth {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "node depth does not follow preorder".into(),
                    });
                }
                nodes[parent].children.push(idx);
            }
            last_at_depth.truncate(node.depth);
            last_at_depth.push(idx);
            nodes.push(node);
        }

        let mut trie = GTrie {
            directed,
            max_depth,
            set,
            nodes,
            roots,
        };
        trie.compute_checks();
        Ok(trie)
    }
}

fn parse_node_line(line: &str, set: &GraphletSet, lineno: usize) -> Result<TrieNode> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let mut t = line.split_whitespace();
    if t.next() != Some("n") {
        return Err(err(format!("expected node line, got '{line}'")));
    }
    let depth: usize = t
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err("missing node depth".into()))?;
    let pattern_tok = t.next().ok_or_else(|| err("missing pattern".into()))?;
    let pattern: Vec<ConnectionType> = if pattern_tok == "-" {
        Vec::new()
    } else {
        pattern_tok
            .bytes()
            .map(|b| {
                if (b'0'..=b'3').contains(&b) {
                    Ok(ConnectionType::from_bits(b - b'0'))
                } else {
                    Err(err(format!("invalid pattern digit '{}'", b as char)))
                }
            })
            .collect::<Result<_>>()?
    };
    if pattern.len() != depth {
        return Err(err(format!(
            "pattern length {} does not match depth {depth}",
            pattern.len()
        )));
    }

    let counting = match t.next() {
        Some("-") => None,
        Some("c") => {
            let graphlet: usize = t
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("missing graphlet index".into()))?;
            if graphlet >= set.len() {
                return Err(err(format!("graphlet index {graphlet} out of range")));
            }
            let orbit_ids: Vec<usize> = t
                .next()
                .ok_or_else(|| err("missing orbit ids".into()))?
                .split(',')
                .map(|s| s.parse().map_err(|_| err(format!("bad orbit id '{s}'"))))
                .collect::<Result<_>>()?;
            if orbit_ids.len() != depth + 1 {
                return Err(err("orbit id count does not match depth".into()));
            }
            if orbit_ids != set.graphlets()[graphlet].orbit_ids {
                return Err(err(format!(
                    "orbit ids disagree with graphlet {graphlet} of the embedded set"
                )));
            }
            let conds_tok = t.next().ok_or_else(|| err("missing conditions".into()))?;
            let conditions: Vec<Condition> = if conds_tok == "-" {
                Vec::new()
            } else {
                conds_tok
                    .split(',')
                    .map(|s| {
                        s.split_once('<')
                            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                            .ok_or_else(|| err(format!("bad condition '{s}'")))
                    })
                    .collect::<Result<_>>()?
            };
            if conditions.iter().any(|&(a, b)| a.max(b) > depth || a == b) {
                return Err(err("condition references a position beyond the node depth".into()));
            }
            Some(CountingInfo {
                graphlet,
                orbit_ids,
                conditions,
                check_final: Vec::new(),
            })
        }
        other => return Err(err(format!("bad counting flag '{other:?}'"))),
    };

    Ok(TrieNode {
        depth,
        pattern,
        children: Vec::new(),
        counting,
        check_here: Vec::new(),
    })
}

/// Symmetry-breaking conditions for one graphlet: repeatedly take the
/// smallest position still moved by the remaining automorphisms, constrain
/// it to precede every other member of its orbit, and restrict to the
/// stabilizer of that position. Among the `|Aut|` vertex assignments
/// realizing any occurrence, exactly one satisfies all conditions.
pub fn symmetry_conditions(g: &SmallGraph) -> Vec<Condition> {
    let mut auts = automorphisms(g);
    let mut conditions = Vec::new();
    while auts.len() > 1 {
        let size = g.size();
        let fixed = (0..size)
            .find(|&p| auts.iter().any(|a| a[p] != p))
            .expect("non-trivial group moves some position");
        let mut orbit: Vec<usize> = auts.iter().map(|a| a[fixed]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for q in orbit {
            if q != fixed {
                conditions.push((fixed, q));
            }
        }
        auts.retain(|a| a[fixed] == fixed);
    }
    conditions.sort_unstable();
    conditions
}
