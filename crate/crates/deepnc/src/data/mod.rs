//! Synthetic generators, graph sampling, and the corruption pipeline that
//! manufactures partially observable networks with a known ground truth.

use crate::graph::{read_edge_list, Graph, GraphError, PartialObservation};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("fraction {0} outside (0, 1]")]
    BadFraction(f64),
    #[error("probability {0} outside (0, 1)")]
    BadProbability(f64),
    #[error("attachment count {c} must satisfy n > c >= 1 (n = {n})")]
    BadAttachment { n: usize, c: usize },
    #[error("community count {0} invalid for {1} nodes")]
    BadCommunities(usize, usize),
    #[error("manifest has no test graph")]
    NoTestGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Node sampling strategy used when carving an observation out of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    RandomNode,
    ForestFire,
}

/// How to corrupt a true graph into a partial observation: keep a node
/// fraction via the sampler, then keep an edge fraction of the induced
/// subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub node_fraction: f64,
    pub edge_fraction: f64,
    pub sampler: SamplerKind,
    pub ff_burn_prob: f64,
}

impl Default for CorruptionSpec {
    fn default() -> Self {
        CorruptionSpec {
            node_fraction: 0.7,
            edge_fraction: 0.9,
            sampler: SamplerKind::RandomNode,
            ff_burn_prob: 0.7,
        }
    }
}

fn check_fraction(f: f64) -> Result<(), DataError> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(DataError::BadFraction(f));
    }
    Ok(())
}

fn target_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).ceil() as usize).min(n)
}

/// Uniform node sample without replacement: `ceil(fraction * n)` nodes, the
/// induced subgraph, and the new-to-old id map.
pub fn rn_sample<T: Rng>(
    g: &Graph,
    fraction: f64,
    rng: &mut T,
) -> Result<(Graph, Vec<usize>), DataError> {
    check_fraction(fraction)?;
    let n = g.node_count();
    let k = target_count(n, fraction);
    let mut ids: Vec<usize> = (0..n).collect();
    // Partial Fisher-Yates: the first k slots become the sample.
    for i in 0..k {
        let j = rng.gen_range(i..n);
        ids.swap(i, j);
    }
    let mut keep = ids[..k].to_vec();
    keep.sort_unstable();
    Ok(g.induced_subgraph(&keep))
}

/// Forest-fire node sample: burn outward from a random seed, with a
/// geometric number of new neighbors per burning node (mean
/// `burn_prob / (1 - burn_prob)`), reseeding uniformly whenever the fire
/// dies, until `ceil(fraction * n)` nodes are burned.
pub fn ff_sample<T: Rng>(
    g: &Graph,
    fraction: f64,
    burn_prob: f64,
    rng: &mut T,
) -> Result<(Graph, Vec<usize>), DataError> {
    check_fraction(fraction)?;
    if !(0.0..=1.0).contains(&burn_prob) {
        return Err(DataError::BadProbability(burn_prob));
    }
    let n = g.node_count();
    let k = target_count(n, fraction);
    let mut burned = vec![false; n];
    let mut burned_count = 0usize;
    let mut queue: VecDeque<usize> = VecDeque::new();

    while burned_count < k {
        if queue.is_empty() {
            let unburned: Vec<usize> = (0..n).filter(|&v| !burned[v]).collect();
            let seed = unburned[rng.gen_range(0..unburned.len())];
            burned[seed] = true;
            burned_count += 1;
            queue.push_back(seed);
            continue;
        }
        let u = queue.pop_front().unwrap();
        let mut fresh: Vec<usize> = g.neighbors(u).filter(|&v| !burned[v]).collect();
        if fresh.is_empty() {
            continue;
        }
        fresh.shuffle(rng);
        // Geometric draw, capped at the available neighbors.
        let mut burn = 0usize;
        while burn < fresh.len() && rng.gen::<f64>() < burn_prob {
            burn += 1;
        }
        for &v in fresh.iter().take(burn) {
            if burned_count == k {
                break;
            }
            burned[v] = true;
            burned_count += 1;
            queue.push_back(v);
        }
    }

    let keep: Vec<usize> = (0..n).filter(|&v| burned[v]).collect();
    Ok(g.induced_subgraph(&keep))
}

/// Keep `ceil(keep_fraction * |E|)` edges uniformly at random; the node set
/// is untouched.
pub fn delete_edges<T: Rng>(
    g: &Graph,
    keep_fraction: f64,
    rng: &mut T,
) -> Result<Graph, DataError> {
    check_fraction(keep_fraction)?;
    let mut edges = g.edges();
    let keep = target_count(edges.len(), keep_fraction);
    for i in 0..keep {
        let j = rng.gen_range(i..edges.len());
        edges.swap(i, j);
    }
    edges.truncate(keep);
    edges.sort_unstable();
    let mut out = Graph::new(g.node_count());
    for (u, v) in edges {
        out.add_edge(u, v)?;
    }
    Ok(out)
}

/// Run the corruption pipeline on a true graph. Returns the partial
/// observation plus the alignment map from observed node id to the id in
/// `g_t` (missing placeholders have no entry).
pub fn corrupt<T: Rng>(
    g_t: &Graph,
    spec: &CorruptionSpec,
    rng: &mut T,
) -> Result<(PartialObservation, Vec<usize>), DataError> {
    let (induced, alignment) = match spec.sampler {
        SamplerKind::RandomNode => rn_sample(g_t, spec.node_fraction, rng)?,
        SamplerKind::ForestFire => ff_sample(g_t, spec.node_fraction, spec.ff_burn_prob, rng)?,
    };
    let observed = delete_edges(&induced, spec.edge_fraction, rng)?;
    let missing = g_t.node_count() - observed.node_count();
    Ok((PartialObservation::new(observed, missing), alignment))
}

/// Preferential-attachment graph: a `c`-clique seed, then each new node
/// attaches to `c` distinct existing nodes with probability proportional to
/// degree.
pub fn generate_ba<T: Rng>(n: usize, c: usize, rng: &mut T) -> Result<Graph, DataError> {
    if c < 1 || n <= c {
        return Err(DataError::BadAttachment { n, c });
    }
    let mut g = Graph::new(n);
    // Repeated-node list: each node appears once per unit of degree.
    let mut lottery: Vec<usize> = Vec::with_capacity(2 * (c * (n - c) + c * (c - 1) / 2));
    for u in 0..c {
        for v in (u + 1)..c {
            g.add_edge(u, v)?;
            lottery.push(u);
            lottery.push(v);
        }
    }
    if c == 1 {
        // A single seed node has degree zero; attach the first newcomer
        // uniformly (the lottery is empty).
        lottery.push(0);
    }
    for v in c..n {
        let mut targets: Vec<usize> = Vec::with_capacity(c);
        while targets.len() < c {
            let candidate = lottery[rng.gen_range(0..lottery.len())];
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &t in &targets {
            g.add_edge(v, t)?;
            lottery.push(v);
            lottery.push(t);
        }
    }
    Ok(g)
}

/// Planted-partition graph: `k` near-equal blocks, within-block edges with
/// probability `p_in`, cross-block with `p_out`, reduced to its largest
/// connected component. Node labels record the planted block of each node.
pub fn generate_planted_partition<T: Rng>(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut T,
) -> Result<Graph, DataError> {
    if k == 0 || k > n {
        return Err(DataError::BadCommunities(k, n));
    }
    for p in [p_in, p_out] {
        if !(p > 0.0 && p < 1.0) {
            return Err(DataError::BadProbability(p));
        }
    }
    if p_in < p_out {
        return Err(DataError::BadProbability(p_out));
    }
    let block_of: Vec<usize> = (0..n).map(|v| v * k / n).collect();
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block_of[u] == block_of[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                g.add_edge(u, v)?;
            }
        }
    }
    g.set_labels(block_of.iter().map(|b| b.to_string()).collect());
    let (lcc, _) = g.largest_component();
    Ok(lcc)
}

/// Graph files with their experiment roles. Paths are interpreted relative
/// to the manifest's own directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub train: Vec<PathBuf>,
    pub test: Vec<PathBuf>,
    pub provenance: String,
    pub seed: u64,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)?;
        let manifest: DatasetManifest = serde_json::from_str(&text)?;
        if manifest.test.is_empty() {
            return Err(DataError::NoTestGraph);
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Load the referenced edge lists, reduced to their largest connected
    /// components, resolving paths against `base`.
    pub fn load_graphs(&self, base: &Path) -> Result<(Vec<Graph>, Vec<Graph>), DataError> {
        let load = |paths: &[PathBuf]| -> Result<Vec<Graph>, DataError> {
            paths
                .iter()
                .map(|p| {
                    let full = if p.is_absolute() { p.clone() } else { base.join(p) };
                    let (g, _) = read_edge_list(&full)?;
                    Ok(g.largest_component().0)
                })
                .collect()
        };
        Ok((load(&self.train)?, load(&self.test)?))
    }
}

#[cfg(test)]
mod tests;
