//! Network comparison: graphlet degree distributions, GDD-agreement and
//! hierarchical clustering of similarity matrices.
//!
//! The per-orbit agreement is `1 - (1/sqrt(2)) * sqrt(sum_k [n_a(k) -
//! n_b(k)]^2)` over normalized distributions. The aggregate is the
//! arithmetic mean: over all orbits for the original metric (`gda-prime`,
//! where orbits absent from both networks contribute 1.0), or only over
//! orbits present in at least one network for the modified metric (`gda`).

use std::collections::BTreeMap;
use std::io::Write;

use crate::census::{gtrie_census_parallel, OrbitFrequencyMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::graphlets::generate;
use crate::gtrie::GTrie;

/// Per-orbit histograms: `hist[j][k]` = number of nodes appearing exactly
/// `k >= 1` times in orbit `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphletDegreeDistribution {
    orbit_count: usize,
    hists: Vec<BTreeMap<u64, u64>>,
}

impl GraphletDegreeDistribution {
    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn hist(&self, orbit: usize) -> &BTreeMap<u64, u64> {
        &self.hists[orbit]
    }
}

/// Histogram of the nonzero entries of each orbit column.
pub fn gdd(m: &OrbitFrequencyMatrix) -> GraphletDegreeDistribution {
    let mut hists = vec![BTreeMap::new(); m.orbit_count()];
    for u in 0..m.node_count() {
        for (j, &c) in m.gdv(u as NodeId).iter().enumerate() {
            if c > 0 {
                *hists[j].entry(c).or_insert(0u64) += 1;
            }
        }
    }
    GraphletDegreeDistribution {
        orbit_count: m.orbit_count(),
        hists,
    }
}

/// Per-orbit distributions scaled by 1/k and normalized to total mass 1;
/// orbits with empty histograms stay identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGdd {
    orbit_count: usize,
    dists: Vec<BTreeMap<u64, f64>>,
}

impl NormalizedGdd {
    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn is_present(&self, orbit: usize) -> bool {
        !self.dists[orbit].is_empty()
    }

    pub fn present_orbits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.orbit_count).filter(|&j| self.is_present(j))
    }

    pub fn dist(&self, orbit: usize) -> &BTreeMap<u64, f64> {
        &self.dists[orbit]
    }

    #[cfg(test)]
    pub(crate) fn from_parts(orbit_count: usize, dists: Vec<(usize, BTreeMap<u64, f64>)>) -> Self {
        let mut all = vec![BTreeMap::new(); orbit_count];
        for (j, d) in dists {
            all[j] = d;
        }
        NormalizedGdd {
            orbit_count,
            dists: all,
        }
    }
}

/// Scales each bin by 1/k and divides by the scaled total.
pub fn normalize(d: &GraphletDegreeDistribution) -> NormalizedGdd {
    let dists = d
        .hists
        .iter()
        .map(|hist| {
            let scaled: BTreeMap<u64, f64> = hist
                .iter()
                .map(|(&k, &count)| (k, count as f64 / k as f64))
                .collect();
            let total: f64 = scaled.values().sum();
            scaled.into_iter().map(|(k, t)| (k, t / total)).collect()
        })
        .collect();
    NormalizedGdd {
        orbit_count: d.orbit_count,
        dists,
    }
}

/// Agreement of one orbit's distributions, in [0,1]; 1 iff identical over
/// the union of bins.
pub fn gda_orbit(a: &NormalizedGdd, b: &NormalizedGdd, orbit: usize) -> f64 {
    let da = &a.dists[orbit];
    let db = &b.dists[orbit];
    let mut sum = 0.0;
    for (&k, &na) in da {
        let nb = db.get(&k).copied().unwrap_or(0.0);
        sum += (na - nb) * (na - nb);
    }
    for (&k, &nb) in db {
        if !da.contains_key(&k) {
            sum += nb * nb;
        }
    }
    1.0 - sum.sqrt() / std::f64::consts::SQRT_2
}

/// Aggregation mode for GDD-agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdaMode {
    /// Mean over orbits present in at least one of the two networks.
    Modified,
    /// Mean over all orbits; orbits absent from both contribute 1.0.
    Original,
}

impl GdaMode {
    pub fn tag(self) -> &'static str {
        match self {
            GdaMode::Modified => "gda",
            GdaMode::Original => "gda-prime",
        }
    }
}

/// GDD-agreement between two normalized distributions.
pub fn gda(a: &NormalizedGdd, b: &NormalizedGdd, mode: GdaMode) -> Result<f64> {
    if a.orbit_count != b.orbit_count {
        return Err(Error::OrbitCountMismatch {
            left: a.orbit_count,
            right: b.orbit_count,
        });
    }
    let m = a.orbit_count;
    match mode {
        GdaMode::Original => {
            let sum: f64 = (0..m).map(|j| gda_orbit(a, b, j)).sum();
            Ok(sum / m as f64)
        }
        GdaMode::Modified => {
            let union: Vec<usize> = (0..m).filter(|&j| a.is_present(j) || b.is_present(j)).collect();
            if union.is_empty() {
                return Err(Error::InvalidInput(
                    "modified GDA is undefined when no orbit appears in either network".into(),
                ));
            }
            let sum: f64 = union.iter().map(|&j| gda_orbit(a, b, j)).sum();
            Ok(sum / union.len() as f64)
        }
    }
}

/// Symmetric matrix of pairwise GDA values with unit diagonal.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub ids: Vec<String>,
    values: Vec<f64>,
    pub metric: GdaMode,
    pub k: usize,
    pub directed: bool,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    /// CSV with an id header row and a symmetric body, values to 4 decimal
    /// places.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(w, "{line}")?;
        }
        write!(w, "id")?;
        for id in &self.ids {
            write!(w, ",{id}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(w, "{}", self.ids[i])?;
            for j in 0..self.len() {
                write!(w, ",{:.4}", self.get(i, j))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Long-form CSV `netA,netB,gda` over all ordered pairs.
    pub fn write_heatmap_csv<W: Write>(&self, mut w: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(w, "{line}")?;
        }
        writeln!(w, "netA,netB,gda")?;
        for i in 0..self.len() {
            for j in 0..self.len() {
                writeln!(w, "{},{},{:.4}", self.ids[i], self.ids[j], self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Censuses each network once over a shared trie and fills the pairwise GDA
/// matrix.
pub fn gda_matrix(
    networks: &[(String, Graph)],
    k: usize,
    mode: GdaMode,
    workers: usize,
) -> Result<SimilarityMatrix> {
    if networks.len() < 2 {
        return Err(Error::InvalidInput("need at least two networks to compare".into()));
    }
    let directed = networks[0].1.directed();
    for (id, g) in networks {
        if g.directed() != directed {
            return Err(Error::Network {
                network: id.clone(),
                source: Box::new(Error::DirectednessMismatch {
                    graph_directed: g.directed(),
                    other_directed: directed,
                }),
            });
        }
    }

    let trie = GTrie::build(generate(k, directed)?);
    let mut normalized = Vec::with_capacity(networks.len());
    for (id, g) in networks {
        let m = gtrie_census_parallel(g, &trie, workers).map_err(|e| Error::Network {
            network: id.clone(),
            source: Box::new(e),
        })?;
        normalized.push(normalize(&gdd(&m)));
    }

    let n = networks.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = gda(&normalized[i], &normalized[j], mode).map_err(|e| Error::Network {
                network: networks[i].0.clone(),
                source: Box::new(e),
            })?;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }

    Ok(SimilarityMatrix {
        ids: networks.iter().map(|(id, _)| id.clone()).collect(),
        values,
        metric: mode,
        k,
        directed,
    })
}

/// One agglomeration step: the two merged cluster ids and the merge height.
/// Leaves are `0..n`; the cluster created by step `i` has id `n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// Stepwise dendrogram over the similarity matrix's network ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub steps: Vec<MergeStep>,
}

/// Agglomerative hierarchical clustering with average linkage on the
/// distance `1 - GDA`. Merge height is half the merge distance, so two
/// identical networks join at height 0. Ties break on the lexicographically
/// smallest member labels, making the tree deterministic.
pub fn cluster(sim: &SimilarityMatrix) -> Result<Dendrogram> {
    let n = sim.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two networks to cluster".into()));
    }

    struct Active {
        id: usize,
        members: Vec<usize>,
        label: String,
    }

    // ties break on the (smaller, larger) label pair
    fn pair_key<'a>(x: &'a Active, y: &'a Active) -> (&'a str, &'a str) {
        if x.label <= y.label {
            (&x.label, &y.label)
        } else {
            (&y.label, &x.label)
        }
    }

    let mut active: Vec<Active> = (0..n)
        .map(|i| Active {
            id: i,
            members: vec![i],
            label: sim.ids[i].clone(),
        })
        .collect();
    let mut steps = Vec::with_capacity(n - 1);

    while active.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let mut sum = 0.0;
                for &a in &active[i].members {
                    for &b in &active[j].members {
                        sum += 1.0 - sim.get(a, b);
                    }
                }
                let d = sum / (active[i].members.len() * active[j].members.len()) as f64;
                let better = match best {
                    None => true,
                    Some((bi, bj, bd)) => {
                        d < bd
                            || (d == bd
                                && pair_key(&active[i], &active[j]) < pair_key(&active[bi], &active[bj]))
                    }
                };
                if better {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, d) = best.expect("at least one pair");
        let right = active.swap_remove(j);
        let left = active.swap_remove(i);
        let height = d / 2.0;
        let (first_id, second_id, label) = if left.label <= right.label {
            (left.id, right.id, left.label.clone())
        } else {
            (right.id, left.id, right.label.clone())
        };
        steps.push(MergeStep {
            left: first_id,
            right: second_id,
            height,
        });
        let mut members = left.members;
        members.extend(right.members);
        members.sort_unstable();
        active.push(Active {
            id: n + steps.len() - 1,
            members,
            label,
        });
    }

    Ok(Dendrogram {
        labels: sim.ids.clone(),
        steps,
    })
}

impl Dendrogram {
    /// Newick tree with branch lengths `parent height - child height`.
    pub fn newick(&self) -> String {
        let n = self.labels.len();
        let mut out = String::new();
        self.write_cluster(n + self.steps.len() - 1, f64::NAN, &mut out);
        out.push(';');
        out
    }

    fn write_cluster(&self, id: usize, parent_height: f64, out: &mut String) {
        let n = self.labels.len();
        let height = if id < n { 0.0 } else { self.steps[id - n].height };
        if id < n {
            out.push_str(&self.labels[id]);
        } else {
            let step = &self.steps[id - n];
            out.push('(');
            self.write_cluster(step.left, height, out);
            out.push(',');
            self.write_cluster(step.right, height, out);
            out.push(')');
        }
        if !parent_height.is_nan() {
            out.push_str(&format!(":{:.6}", parent_height - height));
        }
    }

    /// Partition obtained by undoing the last `clusters - 1` merges; each
    /// group lists its member labels sorted.
    pub fn cut(&self, clusters: usize) -> Vec<Vec<String>> {
        let n = self.labels.len();
        assert!(clusters >= 1 && clusters <= n);
        let keep = n - clusters; // number of merge steps applied
        let mut groups: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
        for step in &self.steps[..keep] {
            let mut merged = groups[step.left].take().expect("cluster consumed twice");
            merged.extend(groups[step.right].take().expect("cluster consumed twice"));
            groups.push(Some(merged));
        }
        let mut out: Vec<Vec<String>> = groups
            .into_iter()
            .flatten()
            .map(|members| {
                let mut labels: Vec<String> =
                    members.iter().map(|&i| self.labels[i].clone()).collect();
                labels.sort();
                labels
            })
            .collect();
        out.sort();
        out
    }
}
