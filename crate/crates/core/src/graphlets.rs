//! Generation of the complete set of non-isomorphic connected graphlets of
//! sizes `2..=k` and the global orbit numbering over them.
//!
//! Generation is by canonical augmentation: every connected graph of size s
//! is some connected graph of size s-1 plus one vertex with a nonempty
//! connection pattern, so extending all canonical representatives by all
//! patterns and deduplicating by canonical key reaches every class exactly
//! once. Directed connectivity is weak connectivity.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::ConnectionType;
use crate::iso::{canonical_form, default_max_k, vertex_orbits, CanonicalKey, OrbitPartition, SmallGraph, MAX_GRAPHLET_NODES};

/// One graphlet: its canonical representative, orbit partition and the
/// global orbit id of each vertex position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graphlet {
    pub graph: SmallGraph,
    pub orbits: OrbitPartition,
    pub orbit_ids: Vec<usize>,
}

/// The ordered collection of non-isomorphic connected graphlets of sizes
/// `2..=k`, sorted by (size, canonical key), with orbits numbered `0..m`
/// in graphlet order then class order.
#[derive(Debug, Clone)]
pub struct GraphletSet {
    k: usize,
    directed: bool,
    graphlets: Vec<Graphlet>,
    orbit_count: usize,
    key_index: HashMap<CanonicalKey, usize>,
}

impl PartialEq for GraphletSet {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.directed == other.directed
            && self.graphlets == other.graphlets
            && self.orbit_count == other.orbit_count
    }
}

impl Eq for GraphletSet {}

/// Generates all connected non-isomorphic graphlets of sizes `2..=k`.
pub fn generate(k: usize, directed: bool) -> Result<GraphletSet> {
    generate_with_limit(k, directed, default_max_k(directed))
}

/// Like [`generate`] but with an explicit upper limit on `k` (capped at the
/// structural maximum of [`MAX_GRAPHLET_NODES`]).
pub fn generate_with_limit(k: usize, directed: bool, limit: usize) -> Result<GraphletSet> {
    let max = limit.min(MAX_GRAPHLET_NODES);
    if k < 2 || k > max {
        return Err(Error::SizeOutOfRange { k, max, directed });
    }

    let mut level: Vec<SmallGraph> = vec![SmallGraph::empty(1, directed)];
    let mut graphlets: Vec<Graphlet> = Vec::new();

    for size in 2..=k {
        let prev_size = size - 1;
        let base: u64 = if directed { 4 } else { 2 };
        let pattern_count = base.pow(prev_size as u32);
        let mut seen: HashMap<u128, SmallGraph> = HashMap::new();

        let mut pattern = vec![ConnectionType::None; prev_size];
        for g in &level {
            for code in 1..pattern_count {
                let mut c = code;
                for slot in pattern.iter_mut() {
                    let digit = (c % base) as u8;
                    *slot = if directed {
                        ConnectionType::from_bits(digit)
                    } else if digit == 1 {
                        ConnectionType::Both
                    } else {
                        ConnectionType::None
                    };
                    c /= base;
                }
                let candidate = g.extended(&pattern);
                let cf = canonical_form(&candidate);
                seen.entry(cf.key.code)
                    .or_insert_with(|| candidate.permuted(&cf.perm));
            }
        }

        let mut reps: Vec<(u128, SmallGraph)> = seen.into_iter().collect();
        reps.sort_unstable_by_key(|&(code, _)| code);
        level = reps.into_iter().map(|(_, g)| g).collect();

        for g in &level {
            let orbits = vertex_orbits(g);
            graphlets.push(Graphlet {
                graph: *g,
                orbits,
                orbit_ids: Vec::new(),
            });
        }
    }

    let mut next_orbit = 0usize;
    for graphlet in &mut graphlets {
        let mut ids = vec![usize::MAX; graphlet.graph.size()];
        for class in &graphlet.orbits.classes {
            for &pos in class {
                ids[pos] = next_orbit;
            }
            next_orbit += 1;
        }
        graphlet.orbit_ids = ids;
    }

    let key_index = graphlets
        .iter()
        .enumerate()
        .map(|(i, g)| (key_of(&g.graph), i))
        .collect();

    Ok(GraphletSet {
        k,
        directed,
        graphlets,
        orbit_count: next_orbit,
        key_index,
    })
}

fn key_of(g: &SmallGraph) -> CanonicalKey {
    CanonicalKey {
        size: g.size() as u8,
        directed: g.directed(),
        code: g.encoding(),
    }
}

impl GraphletSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn graphlets(&self) -> &[Graphlet] {
        &self.graphlets
    }

    pub fn len(&self) -> usize {
        self.graphlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphlets.is_empty()
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    /// Global orbit id of a vertex position of a graphlet.
    pub fn orbit_of(&self, graphlet: usize, position: usize) -> usize {
        self.graphlets[graphlet].orbit_ids[position]
    }

    /// Index of the graphlet whose canonical representative has this key.
    pub fn index_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.key_index.get(key).copied()
    }

    /// Indices of graphlets of exactly this size.
    pub fn indices_of_size(&self, size: usize) -> std::ops::Range<usize> {
        let start = self.graphlets.partition_point(|g| g.graph.size() < size);
        let end = self.graphlets.partition_point(|g| g.graph.size() <= size);
        start..end
    }

    /// Text serialization: header, then one line per graphlet with its size,
    /// row-major matrix digits and orbit classes. Bit-exact across runs.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "graphlet-set 1 {} {} {} {}",
            self.k,
            if self.directed { "directed" } else { "undirected" },
            self.graphlets.len(),
            self.orbit_count
        )?;
        for g in &self.graphlets {
            write!(w, "g {} {}", g.graph.size(), g.graph.digits())?;
            for class in &g.orbits.classes {
                let members: Vec<String> = class.iter().map(|m| m.to_string()).collect();
                write!(w, " {}:{}", members.join("-"), g.orbit_ids[class[0]])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<GraphletSet> {
        let mut lines = NumberedLines::new(r);
        Self::read_from(&mut lines)
    }

    pub(crate) fn read_from<R: BufRead>(lines: &mut NumberedLines<R>) -> Result<GraphletSet> {
        let (lineno, header) = lines.next_data_line()?.ok_or(Error::EmptyInput)?;
        let set = Self::parse_header(&header).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("bad graphlet-set header '{header}'"),
        })?;
        let (k, directed, count, orbit_count) = set;

        let mut graphlets = Vec::with_capacity(count);
        for _ in 0..count {
            let (lineno, line) = lines.next_data_line()?.ok_or_else(|| Error::Parse {
                line: lines.current_line(),
                msg: "truncated graphlet-set: missing graphlet line".into(),
            })?;
            graphlets.push(parse_graphlet_line(&line, directed, lineno)?);
        }

        let max_id = graphlets
            .iter()
            .flat_map(|g| g.orbit_ids.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        if max_id != orbit_count {
            return Err(Error::InvalidInput(format!(
                "orbit count mismatch in file: header says {orbit_count}, lines imply {max_id}"
            )));
        }

        let key_index = graphlets
            .iter()
            .enumerate()
            .map(|(i, g)| (key_of(&g.graph), i))
            .collect();

        Ok(GraphletSet {
            k,
            directed,
            graphlets,
            orbit_count,
            key_index,
        })
    }

    fn parse_header(line: &str) -> Option<(usize, bool, usize, usize)> {
        let mut t = line.split_whitespace();
        if t.next()? != "graphlet-set" || t.next()? != "1" {
            return None;
        }
        let k = t.next()?.parse().ok()?;
        let directed = match t.next()? {
            "directed" => true,
            "undirected" => false,
            _ => return None,
        };
        let count = t.next()?.parse().ok()?;
        let orbits = t.next()?.parse().ok()?;
        Some((k, directed, count, orbits))
    }
}

fn parse_graphlet_line(line: &str, directed: bool, lineno: usize) -> Result<Graphlet> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let mut t = line.split_whitespace();
    if t.next() != Some("g") {
        return Err(err(format!("expected graphlet line, got '{line}'")));
    }
    let size: usize = t
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err("missing graphlet size".into()))?;
    let digits = t.next().ok_or_else(|| err("missing matrix digits".into()))?;
    let graph = SmallGraph::from_digits(digits, directed).map_err(|e| err(e.to_string()))?;
    if graph.size() != size {
        return Err(err(format!("size {size} does not match matrix of {}", graph.size())));
    }

    let mut classes = Vec::new();
    let mut orbit_ids = vec![usize::MAX; size];
    for token in t {
        let (members, id) = token
            .split_once(':')
            .ok_or_else(|| err(format!("bad orbit class '{token}'")))?;
        let id: usize = id.parse().map_err(|_| err(format!("bad orbit id in '{token}'")))?;
        let mut class = Vec::new();
        for m in members.split('-') {
            let pos: usize = m.parse().map_err(|_| err(format!("bad position in '{token}'")))?;
            if pos >= size || orbit_ids[pos] != usize::MAX {
                return Err(err(format!("position {pos} invalid or repeated")));
            }
            orbit_ids[pos] = id;
            class.push(pos);
        }
        classes.push(class);
    }
    if orbit_ids.contains(&usize::MAX) {
        return Err(err("orbit classes do not cover all positions".into()));
    }
    Ok(Graphlet {
        graph,
        orbits: OrbitPartition { classes },
        orbit_ids,
    })
}

/// Line iterator skipping blanks and `#` comments, tracking line numbers.
pub(crate) struct NumberedLines<R> {
    reader: R,
    line: usize,
}

impl<R: BufRead> NumberedLines<R> {
    pub(crate) fn new(reader: R) -> Self {
        NumberedLines { reader, line: 0 }
    }

    pub(crate) fn current_line(&self) -> usize {
        self.line
    }

    pub(crate) fn next_data_line(&mut self) -> Result<Option<(usize, String)>> {
        loop {
            let mut buf = String::new();
            if self.reader.read_line(&mut buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let trimmed = buf.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line, trimmed.to_string())));
        }
    }
}
