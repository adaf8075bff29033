//! Network completion: greedy per-node inference and its EM refinement.
//!
//! `deepnc_l` grows a node ordering one position at a time. Each step runs
//! the sequence model to get a probability row, picks a node type at random
//! in proportion to the remaining pool sizes, scores frontier candidates by
//! their odds-ratio product `D_v`, imputes the unknown entries of the new
//! row by Bernoulli trials, and repeats until the node budget is spent. It
//! treats absent edges between observed nodes as true zeros.
//!
//! `deepnc_em` drops that assumption: it extracts edge-existence
//! probabilities for every unlinked observed pair from a completed run
//! (`filter_pair_probs`), alternates between sampling candidate edge sets
//! and re-running the greedy inference on the augmented observations, and
//! averages the refiltered probabilities until they stop moving. A final
//! sample of the inferred pairs seeds the terminal greedy run.

use crate::graph::{
    decode_sequence, AdjacencySequence, Graph, GraphError, NodeOrdering, PartialObservation,
    SeqEntry,
};
use crate::grnn::{phi_slot, window_row, GrnnError, ModelParams};
use crate::real::{clamp_prob, Real, PROB_FLOOR};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompletionError {
    #[error("observation has no observed nodes")]
    EmptyObservation,
    #[error("node pool is empty")]
    EmptyPool,
    #[error("model window {0} does not match mlp output width {1}")]
    InconsistentModel(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Grnn(#[from] GrnnError),
}

/// Which pool the next node is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeType {
    Observable,
    Missing,
}

/// Value assigned to observed pairs whose ordering gap exceeds the model
/// window when extracting pair probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutOfWindowPolicy {
    /// Half the mean of the row's in-window probabilities, floor-clamped.
    HalfRowMean,
    /// The probability floor: the windowed model treats such pairs as
    /// structurally unlinked.
    Floor,
}

/// EM loop knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    /// Number of edge-set samples per E-step.
    pub sample_count: usize,
    /// Stop once the L2 change of the pair probabilities falls below this.
    pub threshold: f64,
    pub max_iterations: usize,
    pub out_of_window: OutOfWindowPolicy,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            sample_count: 10,
            threshold: 1e-3,
            max_iterations: 6,
            out_of_window: OutOfWindowPolicy::HalfRowMean,
        }
    }
}

/// Edge-existence probabilities for the unlinked observed pairs, keyed by
/// `(min, max)` node id. Key order is canonical, so norms and sampling are
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProbabilities<R> {
    map: BTreeMap<(usize, usize), R>,
}

impl<R: Real> PairProbabilities<R> {
    pub fn empty() -> Self {
        PairProbabilities {
            map: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, u: usize, v: usize) -> Option<R> {
        let key = (u.min(v), u.max(v));
        self.map.get(&key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &R)> {
        self.map.iter()
    }

    /// L2 norm of the difference, in canonical key order. Both sides must
    /// carry the same key set.
    pub fn l2_distance(&self, other: &PairProbabilities<R>) -> f64 {
        debug_assert_eq!(self.map.len(), other.map.len());
        let mut acc = 0.0f64;
        for ((ka, a), (kb, b)) in self.map.iter().zip(other.map.iter()) {
            debug_assert_eq!(ka, kb);
            let d = a.as_f64() - b.as_f64();
            acc += d * d;
        }
        acc.sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.map.values().map(|v| v.as_f64()).sum()
    }
}

/// One audit entry of the greedy loop.
#[derive(Debug, Clone)]
pub struct StepDecision<R> {
    /// 0-based ordering position that was filled.
    pub position: usize,
    pub node: usize,
    pub node_type: NodeType,
    /// `D_v` table over the frontier at observable-selection steps.
    pub frontier_scores: Vec<(usize, R)>,
    /// True when the node was drawn uniformly outside the frontier.
    pub fallback_random: bool,
}

/// Completed inference: the ordering, the collected probability rows
/// (window layout, row `k` is empty for `k = 0`), the realized graph, and
/// the per-step decision log. `em_trace` holds the L2 movement of the pair
/// probabilities per EM iteration and stays empty for plain greedy runs.
#[derive(Debug, Clone)]
pub struct CompletionResult<R> {
    pub ordering: NodeOrdering,
    pub phi_rows: Vec<Vec<R>>,
    pub graph: Graph,
    pub decisions: Vec<StepDecision<R>>,
    pub em_trace: Vec<f64>,
}

/// Bookkeeping of a partially built ordering: the remaining pool, the
/// frontier, the placed prefix, and the imputed rows so far.
#[derive(Debug, Clone)]
pub struct CompletionState<R> {
    obs: PartialObservation,
    window_m: usize,
    remaining: BTreeSet<usize>,
    remaining_missing: usize,
    frontier: BTreeSet<usize>,
    order: Vec<usize>,
    position: Vec<Option<usize>>,
    rows: Vec<Vec<SeqEntry>>,
    phi_rows: Vec<Vec<R>>,
}

impl<R: Real> CompletionState<R> {
    /// Fresh state with nothing placed.
    pub fn new(obs: PartialObservation, window_m: usize) -> Result<Self, CompletionError> {
        if obs.observed.node_count() == 0 {
            return Err(CompletionError::EmptyObservation);
        }
        let n = obs.total_nodes();
        Ok(CompletionState {
            remaining: (0..n).collect(),
            remaining_missing: obs.missing_node_count,
            frontier: BTreeSet::new(),
            order: Vec::with_capacity(n),
            position: vec![None; n],
            rows: Vec::with_capacity(n),
            phi_rows: Vec::with_capacity(n),
            obs,
            window_m,
        })
    }

    pub fn observation(&self) -> &PartialObservation {
        &self.obs
    }

    pub fn window(&self) -> usize {
        self.window_m
    }

    pub fn placed_count(&self) -> usize {
        self.order.len()
    }

    pub fn remaining(&self) -> &BTreeSet<usize> {
        &self.remaining
    }

    pub fn remaining_missing(&self) -> usize {
        self.remaining_missing
    }

    pub fn frontier(&self) -> &BTreeSet<usize> {
        &self.frontier
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.position[node]
    }

    pub fn rows(&self) -> &[Vec<SeqEntry>] {
        &self.rows
    }

    pub fn phi_rows(&self) -> &[Vec<R>] {
        &self.phi_rows
    }

    /// Remaining observable nodes, `V_O ∩ V^(i)`.
    pub fn remaining_observable(&self) -> impl Iterator<Item = usize> + '_ {
        self.remaining.iter().copied().filter(|&v| self.obs.is_observed(v))
    }

    /// Place `node` at the next position and maintain the frontier per the
    /// update rule: neighbors of an observed pick join, placed nodes leave.
    pub fn place(&mut self, node: usize) -> Result<(), CompletionError> {
        if !self.remaining.remove(&node) {
            return Err(CompletionError::EmptyPool);
        }
        let observed = self.obs.is_observed(node);
        if !observed {
            self.remaining_missing -= 1;
        }
        self.position[node] = Some(self.order.len());
        self.order.push(node);
        update_frontier_in_place(
            &mut self.frontier,
            &self.remaining,
            &self.obs,
            node,
            observed,
        );
        Ok(())
    }

    fn push_row(&mut self, row: Vec<SeqEntry>, phi: Vec<R>) {
        debug_assert_eq!(row.len(), self.order.len() - 1);
        self.rows.push(row);
        self.phi_rows.push(phi);
    }
}

fn update_frontier_in_place(
    frontier: &mut BTreeSet<usize>,
    remaining: &BTreeSet<usize>,
    obs: &PartialObservation,
    chosen: usize,
    chosen_observed: bool,
) {
    if chosen_observed {
        for v in obs.observed.neighbors(chosen) {
            if remaining.contains(&v) {
                frontier.insert(v);
            }
        }
    }
    frontier.remove(&chosen);
}

/// Draw the type of the next node: missing with probability `m / |V^(i)|`,
/// where `m` counts the unplaced missing nodes. Degenerate pools return the
/// available type without consuming randomness.
pub fn select_node_type<R: Real, T: Rng>(
    state: &CompletionState<R>,
    rng: &mut T,
) -> Result<NodeType, CompletionError> {
    let total = state.remaining.len();
    if total == 0 {
        return Err(CompletionError::EmptyPool);
    }
    let m = state.remaining_missing;
    if m == 0 {
        return Ok(NodeType::Observable);
    }
    if m == total {
        return Ok(NodeType::Missing);
    }
    if rng.gen_range(0..total) < m {
        Ok(NodeType::Missing)
    } else {
        Ok(NodeType::Observable)
    }
}

/// Odds-ratio score of a frontier candidate hypothetically placed at the
/// next position: the product of `phi/(1-phi)` over its already-placed
/// observed neighbors (the 1-entries of its observable row), restricted to
/// the window. Nodes without placed neighbors implicitly score 1.
pub fn ratio_score<R: Real>(state: &CompletionState<R>, phi: &[R], candidate: usize) -> R {
    let i = state.order.len(); // hypothetical 0-based position
    let mut score = R::one();
    for u in state.obs.observed.neighbors(candidate) {
        let Some(pos) = state.position[u] else {
            continue;
        };
        let Some(slot) = phi_slot(i, pos, state.window_m) else {
            continue;
        };
        let p = phi[slot];
        score = score * (p / (R::one() - p));
    }
    score
}

/// `D_v` table over the frontier.
pub fn score_candidates<R: Real>(state: &CompletionState<R>, phi: &[R]) -> Vec<(usize, R)> {
    state
        .frontier
        .iter()
        .map(|&v| (v, ratio_score(state, phi, v)))
        .collect()
}

/// Full observable-entry likelihood of placing `candidate` next: the product
/// over already-placed observed nodes (ascending position, within window) of
/// `phi` for neighbors and `1 - phi` for non-neighbors. This is the quantity
/// the ratio score orders; it is computed directly only for verification.
pub fn observable_likelihood<R: Real>(
    state: &CompletionState<R>,
    phi: &[R],
    candidate: usize,
) -> R {
    let i = state.order.len();
    let mut acc = R::one();
    for (pos, &u) in state.order.iter().enumerate() {
        if !state.obs.is_observed(u) {
            continue;
        }
        let Some(slot) = phi_slot(i, pos, state.window_m) else {
            continue;
        };
        let p = phi[slot];
        if state.obs.observed.has_edge(u, candidate) {
            acc = acc * p;
        } else {
            acc = acc * (R::one() - p);
        }
    }
    acc
}

/// Pick the observable node for this step. When the frontier offers nothing
/// better than an unconnected node (every `D_v < 1`, or the frontier is
/// empty) and unconnected candidates exist, one of them is drawn uniformly;
/// otherwise the maximal `D_v` wins, ties broken uniformly.
pub fn select_observable_node<R: Real, T: Rng>(
    state: &CompletionState<R>,
    scores: &[(usize, R)],
    rng: &mut T,
) -> Result<(usize, bool), CompletionError> {
    let pool: Vec<usize> = state.remaining_observable().collect();
    if pool.is_empty() {
        return Err(CompletionError::EmptyPool);
    }
    let outside: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|v| !state.frontier.contains(v))
        .collect();
    let all_below_one = scores.iter().all(|(_, d)| *d < R::one());
    if (all_below_one || scores.is_empty()) && !outside.is_empty() {
        let v = outside[rng.gen_range(0..outside.len())];
        return Ok((v, true));
    }
    // Argmax with uniform tie-breaking among exact maximizers.
    let mut best = R::neg_infinity();
    for (_, d) in scores {
        if *d > best {
            best = *d;
        }
    }
    let winners: Vec<usize> = scores
        .iter()
        .filter(|(_, d)| *d == best)
        .map(|(v, _)| *v)
        .collect();
    if winners.is_empty() {
        // Frontier equals the pool but is empty: impossible with a non-empty
        // pool, guarded above.
        return Err(CompletionError::EmptyPool);
    }
    let v = winners[rng.gen_range(0..winners.len())];
    Ok((v, false))
}

/// Impute the row of the node just placed at the last position: entries
/// between observed pairs copy the observation, anything touching a missing
/// node is a Bernoulli draw from the probability row. Entries beyond the
/// window are structural zeros of the windowed model.
pub fn impute_row<R: Real, T: Rng>(
    state: &CompletionState<R>,
    phi: &[R],
    rng: &mut T,
) -> Vec<SeqEntry> {
    let i = state.order.len() - 1; // row index of the node just placed
    let node = state.order[i];
    (0..i)
        .map(|j| {
            let other = state.order[j];
            if state.obs.is_observed(node) && state.obs.is_observed(other) {
                SeqEntry::from_bit(state.obs.observed.has_edge(other, node))
            } else {
                match phi_slot(i, j, state.window_m) {
                    Some(slot) => SeqEntry::from_bit(rng.gen::<f64>() < phi[slot].as_f64()),
                    None => SeqEntry::Zero,
                }
            }
        })
        .collect()
}

fn validate_model<R: Real>(params: &ModelParams<R>) -> Result<(), CompletionError> {
    if params.mlp.out_width() != params.window_m || params.gru.input_dim != params.window_m {
        return Err(CompletionError::InconsistentModel(
            params.window_m,
            params.mlp.out_width(),
        ));
    }
    Ok(())
}

/// Greedy completion. Runs the full inference loop and realizes the graph:
/// the decoded imputed sequence, unioned with every observed edge.
pub fn deepnc_l<R: Real, T: Rng>(
    obs: &PartialObservation,
    params: &ModelParams<R>,
    rng: &mut T,
) -> Result<CompletionResult<R>, CompletionError> {
    validate_model(params)?;
    let mut state = CompletionState::<R>::new(obs.clone(), params.window_m)?;
    let n = obs.total_nodes();
    let mut gen_state = params.init_state(rng);
    let mut decisions = Vec::with_capacity(n);

    // First node: uniform over the whole pool.
    let first = {
        let pool: Vec<usize> = state.remaining.iter().copied().collect();
        pool[rng.gen_range(0..pool.len())]
    };
    let first_type = if obs.is_observed(first) {
        NodeType::Observable
    } else {
        NodeType::Missing
    };
    state.place(first)?;
    state.push_row(Vec::new(), Vec::new());
    decisions.push(StepDecision {
        position: 0,
        node: first,
        node_type: first_type,
        frontier_scores: Vec::new(),
        fallback_random: true,
    });

    for i in 1..n {
        let input = window_row(&state.rows[i - 1], params.window_m)?;
        gen_state = params.transition(&gen_state, &input)?;
        let phi = params.edge_probabilities(&gen_state)?;

        let node_type = select_node_type(&state, rng)?;
        let (node, scores, fallback) = match node_type {
            NodeType::Missing => {
                let pool: Vec<usize> = state
                    .remaining
                    .iter()
                    .copied()
                    .filter(|&v| !obs.is_observed(v))
                    .collect();
                (pool[rng.gen_range(0..pool.len())], Vec::new(), true)
            }
            NodeType::Observable => {
                let scores = score_candidates(&state, &phi);
                let (node, fallback) = select_observable_node(&state, &scores, rng)?;
                (node, scores, fallback)
            }
        };

        state.place(node)?;
        let row = impute_row(&state, &phi, rng);
        state.push_row(row, phi);
        decisions.push(StepDecision {
            position: i,
            node,
            node_type,
            frontier_scores: scores,
            fallback_random: fallback,
        });
    }

    let ordering = NodeOrdering::from_order(state.order.clone())?;
    let seq = AdjacencySequence::from_rows(state.rows.clone())?;
    let mut graph = decode_sequence(&seq, &ordering)?;
    for (u, v) in obs.observed.edges() {
        graph.add_edge(u, v)?;
    }
    debug_assert_eq!(graph.node_count(), n);
    Ok(CompletionResult {
        ordering,
        phi_rows: state.phi_rows,
        graph,
        decisions,
        em_trace: Vec::new(),
    })
}

/// Extract edge-existence probabilities for every unlinked observed pair
/// from a completed run. In-window pairs read the probability row of the
/// later-placed node at their ordering gap; pairs beyond the window fall
/// back to `policy`.
pub fn filter_pair_probs<R: Real>(
    ordering: &NodeOrdering,
    phi_rows: &[Vec<R>],
    obs: &PartialObservation,
    window_m: usize,
    policy: OutOfWindowPolicy,
) -> PairProbabilities<R> {
    let n_obs = obs.observed.node_count();
    let mut map = BTreeMap::new();
    for u in 0..n_obs {
        for v in (u + 1)..n_obs {
            if obs.observed.has_edge(u, v) {
                continue;
            }
            let (p, q) = {
                let pu = ordering.position_of(u);
                let pv = ordering.position_of(v);
                (pu.min(pv), pu.max(pv))
            };
            let row = &phi_rows[q];
            let value = match phi_slot(q, p, window_m) {
                Some(slot) => row[slot],
                None => match policy {
                    OutOfWindowPolicy::Floor => R::of(PROB_FLOOR),
                    OutOfWindowPolicy::HalfRowMean => {
                        let mean = row.iter().copied().sum::<R>() / R::of(row.len() as f64);
                        R::of(0.5) * mean
                    }
                },
            };
            map.insert((u, v), clamp_prob(value));
        }
    }
    PairProbabilities { map }
}

/// Independent Bernoulli draw per pair, in canonical key order.
pub fn sample_missing_edges<R: Real, T: Rng>(
    pz: &PairProbabilities<R>,
    rng: &mut T,
) -> Vec<(usize, usize)> {
    pz.map
        .iter()
        .filter(|(_, p)| rng.gen::<f64>() < p.as_f64())
        .map(|(&k, _)| k)
        .collect()
}

/// EM completion. Alternates edge sampling and greedy re-inference until the
/// pair probabilities stop moving (or `max_iterations`), then samples a
/// final edge set and runs the greedy inference once more on the augmented
/// observation. With no unlinked observed pairs this is exactly one greedy
/// run.
pub fn deepnc_em<R: Real, T: Rng>(
    obs: &PartialObservation,
    params: &ModelParams<R>,
    cfg: &EmConfig,
    rng: &mut T,
) -> Result<CompletionResult<R>, CompletionError> {
    let init = deepnc_l(obs, params, rng)?;
    let mut pz = filter_pair_probs(&init.ordering, &init.phi_rows, obs, params.window_m, cfg.out_of_window);
    if pz.is_empty() {
        return Ok(init);
    }

    let mut trace = Vec::new();
    for _ in 0..cfg.max_iterations {
        let mut acc: BTreeMap<(usize, usize), R> =
            pz.map.keys().map(|&k| (k, R::zero())).collect();
        for _ in 0..cfg.sample_count.max(1) {
            let extra = sample_missing_edges(&pz, rng);
            let augmented = augment(obs, &extra)?;
            let run = deepnc_l(&augmented, params, rng)?;
            let sample_pz = filter_pair_probs(
                &run.ordering,
                &run.phi_rows,
                obs,
                params.window_m,
                cfg.out_of_window,
            );
            for (k, p) in sample_pz.map {
                *acc.get_mut(&k).expect("fixed key set") += p;
            }
        }
        let scale = R::one() / R::of(cfg.sample_count.max(1) as f64);
        let next = PairProbabilities {
            map: acc
                .into_iter()
                .map(|(k, v)| (k, clamp_prob(v * scale)))
                .collect(),
        };
        let delta = next.l2_distance(&pz);
        trace.push(delta);
        pz = next;
        if delta < cfg.threshold {
            break;
        }
    }

    let final_edges = sample_missing_edges(&pz, rng);
    let augmented = augment(obs, &final_edges)?;
    let mut result = deepnc_l(&augmented, params, rng)?;
    // The realized graph contains the augmented observation, hence the
    // original one as well.
    result.em_trace = trace;
    Ok(result)
}

fn augment(
    obs: &PartialObservation,
    extra: &[(usize, usize)],
) -> Result<PartialObservation, CompletionError> {
    let mut g = obs.observed.clone();
    for &(u, v) in extra {
        g.add_edge(u, v)?;
    }
    Ok(PartialObservation::new(g, obs.missing_node_count))
}

#[cfg(test)]
mod tests;
