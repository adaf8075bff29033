//! Graph edit distance and structural statistics.
//!
//! The edit model allows vertex substitution, edge insertion, edge deletion,
//! and edge substitution at unit cost. With the node counts equalized by
//! padding the smaller graph with isolated nodes, vertex substitutions are
//! free and the distance reduces to the edge symmetric difference minimized
//! over node bijections. The exact scorer enumerates bijections and is
//! limited to seven nodes; the approximate scorer picks one bijection via a
//! bipartite assignment on local-structure costs and tightens it with
//! pairwise swaps, so it is an upper bound on the exact value by
//! construction.

mod assignment;

pub use assignment::min_cost_assignment;

use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("exact edit distance supports at most {limit} nodes, got {got}; use the approximate scorer")]
    TooLargeForExact { got: usize, limit: usize },
    #[error("edit distance of empty graphs is undefined")]
    EmptyGraphs,
}

/// Node-count ceiling of the exact scorer (8! bijections is already slow).
pub const EXACT_GED_LIMIT: usize = 7;

/// Tie-break added to non-identity pairs in the assignment cost, small
/// enough never to outweigh a unit edit.
const IDENTITY_TIE_BREAK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GedMethod {
    Exact,
    Approximate,
}

/// Edit operations realized by the chosen bijection, transforming the first
/// graph into the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EditCounts {
    pub edge_insertions: usize,
    pub edge_deletions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GedResult {
    pub cost: f64,
    /// Cost divided by the average node count of the two graphs.
    pub normalized: f64,
    pub method: GedMethod,
    pub edits: EditCounts,
}

/// Pad both graphs with isolated nodes up to a common node count.
fn equalize(g1: &Graph, g2: &Graph) -> (Graph, Graph) {
    let n = g1.node_count().max(g2.node_count());
    let pad = |g: &Graph| {
        let mut out = Graph::new(n);
        for (u, v) in g.edges() {
            out.add_edge(u, v).expect("padded edge in range");
        }
        out
    };
    (pad(g1), pad(g2))
}

fn normalize(cost: f64, g1: &Graph, g2: &Graph) -> f64 {
    cost / ((g1.node_count() + g2.node_count()) as f64 / 2.0)
}

/// Edge symmetric difference under a node bijection `sigma` (g1 id -> g2 id)
/// as (cost, deletions, insertions).
fn mapped_difference(g1: &Graph, g2: &Graph, sigma: &[usize]) -> (usize, usize, usize) {
    let mut matched = 0usize;
    for (u, v) in g1.edges() {
        if g2.has_edge(sigma[u], sigma[v]) {
            matched += 1;
        }
    }
    let deletions = g1.edge_count() - matched;
    let insertions = g2.edge_count() - matched;
    (deletions + insertions, deletions, insertions)
}

/// Exact edit distance by exhausting node bijections. Limited to
/// [`EXACT_GED_LIMIT`] nodes; unequal node counts are padded first.
pub fn exact_ged_small(g1: &Graph, g2: &Graph) -> Result<GedResult, MetricsError> {
    let got = g1.node_count().max(g2.node_count());
    if got > EXACT_GED_LIMIT {
        return Err(MetricsError::TooLargeForExact {
            got,
            limit: EXACT_GED_LIMIT,
        });
    }
    if g1.node_count() == 0 && g2.node_count() == 0 {
        return Err(MetricsError::EmptyGraphs);
    }
    let (a, b) = equalize(g1, g2);
    let n = a.node_count();
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    let mut best_edits = EditCounts::default();
    permute(&mut sigma, 0, &mut |perm| {
        let (cost, del, ins) = mapped_difference(&a, &b, perm);
        if cost < best {
            best = cost;
            best_edits = EditCounts {
                edge_insertions: ins,
                edge_deletions: del,
            };
        }
    });
    Ok(GedResult {
        cost: best as f64,
        normalized: normalize(best as f64, g1, g2),
        method: GedMethod::Exact,
        edits: best_edits,
    })
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Sorted-descending neighbor degree list.
fn neighbor_degrees(g: &Graph, u: usize) -> Vec<usize> {
    let mut d: Vec<usize> = g.neighbors(u).map(|v| g.degree(v)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d
}

/// L1 distance between two descending degree multisets, padded with zeros.
fn multiset_distance(a: &[usize], b: &[usize]) -> f64 {
    let len = a.len().max(b.len());
    let mut acc = 0.0;
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0) as f64;
        let y = b.get(i).copied().unwrap_or(0) as f64;
        acc += (x - y).abs();
    }
    acc
}

fn directed_approx(a: &Graph, b: &Graph) -> (usize, EditCounts) {
    let n = a.node_count();
    let deg_a: Vec<usize> = (0..n).map(|u| a.degree(u)).collect();
    let deg_b: Vec<usize> = (0..n).map(|u| b.degree(u)).collect();
    let nbr_a: Vec<Vec<usize>> = (0..n).map(|u| neighbor_degrees(a, u)).collect();
    let nbr_b: Vec<Vec<usize>> = (0..n).map(|u| neighbor_degrees(b, u)).collect();
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    let degree_term = (deg_a[u] as f64 - deg_b[v] as f64).abs();
                    let nbr_term = multiset_distance(&nbr_a[u], &nbr_b[v]);
                    let tie = if u == v { 0.0 } else { IDENTITY_TIE_BREAK };
                    degree_term + nbr_term + tie
                })
                .collect()
        })
        .collect();
    let (mut sigma, _) = min_cost_assignment(&cost);
    refine_assignment(a, b, &mut sigma);
    let (cost, del, ins) = mapped_difference(a, b, &sigma);
    (
        cost,
        EditCounts {
            edge_insertions: ins,
            edge_deletions: del,
        },
    )
}

/// Greedy pairwise-swap refinement of a bijection: keep applying the first
/// swap that lowers the realized edge difference until none is left. The
/// result is still a bijection, so the upper-bound property is untouched.
fn refine_assignment(a: &Graph, b: &Graph, sigma: &mut [usize]) {
    let n = sigma.len();
    let mut current = mapped_difference(a, b, sigma).0;
    loop {
        let mut improved = false;
        for u in 0..n {
            for v in (u + 1)..n {
                sigma.swap(u, v);
                let candidate = mapped_difference(a, b, sigma).0;
                if candidate < current {
                    current = candidate;
                    improved = true;
                } else {
                    sigma.swap(u, v);
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Bipartite-assignment upper bound on the edit distance: node-to-node costs
/// from local structure (degree gap plus neighborhood degree-multiset
/// distance), an optimal assignment, and the realized edge symmetric
/// difference under it. Evaluated in both directions, keeping the cheaper.
pub fn approximate_ged(g1: &Graph, g2: &Graph) -> Result<GedResult, MetricsError> {
    if g1.node_count() == 0 && g2.node_count() == 0 {
        return Err(MetricsError::EmptyGraphs);
    }
    let (a, b) = equalize(g1, g2);
    let (fwd, fwd_edits) = directed_approx(&a, &b);
    let (bwd, bwd_edits) = directed_approx(&b, &a);
    let (cost, edits) = if fwd <= bwd {
        (fwd, fwd_edits)
    } else {
        (
            bwd,
            // Swap roles so the counts still describe g1 -> g2.
            EditCounts {
                edge_insertions: bwd_edits.edge_deletions,
                edge_deletions: bwd_edits.edge_insertions,
            },
        )
    };
    Ok(GedResult {
        cost: cost as f64,
        normalized: normalize(cost as f64, g1, g2),
        method: GedMethod::Approximate,
        edits,
    })
}

/// Normalized approximate edit distance.
pub fn normalized_ged(g1: &Graph, g2: &Graph) -> Result<f64, MetricsError> {
    Ok(approximate_ged(g1, g2)?.normalized)
}

/// Structural statistics of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    /// Average local clustering coefficient (nodes of degree < 2 count 0).
    pub clustering: f64,
    pub component_count: usize,
    pub largest_component: usize,
    /// `(degree, node count)` pairs, ascending.
    pub degree_histogram: Vec<(usize, usize)>,
}

pub fn structure_report(g: &Graph) -> StructureReport {
    let n = g.node_count();
    let mut max_degree = 0usize;
    let mut clustering_sum = 0.0;
    let mut hist = std::collections::BTreeMap::new();
    for u in 0..n {
        let d = g.degree(u);
        max_degree = max_degree.max(d);
        *hist.entry(d).or_insert(0usize) += 1;
        if d >= 2 {
            let nbrs: Vec<usize> = g.neighbors(u).collect();
            let mut closed = 0usize;
            for i in 0..nbrs.len() {
                for j in (i + 1)..nbrs.len() {
                    if g.has_edge(nbrs[i], nbrs[j]) {
                        closed += 1;
                    }
                }
            }
            clustering_sum += closed as f64 / (d * (d - 1) / 2) as f64;
        }
    }
    let comps = g.components();
    StructureReport {
        node_count: n,
        edge_count: g.edge_count(),
        mean_degree: if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / n as f64 },
        max_degree,
        clustering: if n == 0 { 0.0 } else { clustering_sum / n as f64 },
        component_count: comps.len(),
        largest_component: comps.first().map_or(0, |c| c.len()),
        degree_histogram: hist.into_iter().collect(),
    }
}
