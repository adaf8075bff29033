//! Autoregressive sequence model of graphs.
//!
//! A graph under a BFS ordering becomes a sequence of adjacency rows; the
//! model walks that sequence with a GRU stack (the state transition) and
//! emits, through a perceptron head, a probability row for the *next* node's
//! connections. Rows are presented to the network in a fixed-width lookback
//! window of width `M`: entry `w` (0-based) of a network row refers to the
//! node `w + 1` positions back in the ordering. `M` is fitted to the maximum
//! BFS bandwidth of the training corpus, so on in-distribution orderings no
//! edge falls outside the window; rows longer than `M` are truncated to the
//! most recent `M` positions and shorter rows are zero-padded under a
//! validity mask.
//!
//! Training is teacher-forced minibatch SGD with Adam on masked binary
//! cross-entropy; each graph contributes freshly sampled BFS orderings every
//! time it appears in a batch.

mod checkpoint;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use train::{train, TrainReport};

use crate::graph::{
    bfs_ordering, decode_sequence, encode_sequence, AdjacencySequence, Graph, GraphError,
    NodeOrdering, PartialObservation, SeqEntry,
};
use crate::nn::{GruStackParams, MlpParams, NnError, ParamBlock, TensorView, TensorViewMut};
use crate::real::Real;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrnnError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("row width {0} does not match window {1}")]
    WindowMismatch(usize, usize),
    #[error("sequence has unimputed entries")]
    UnknownEntries,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Architecture knobs. `paper()` is the published configuration; `desk()` is
/// small enough to train in minutes on a laptop core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layer_count: usize,
    pub hidden_dim: usize,
    pub mlp_hidden: usize,
}

impl ModelConfig {
    pub fn paper() -> Self {
        ModelConfig {
            layer_count: 4,
            hidden_dim: 128,
            mlp_hidden: 64,
        }
    }

    pub fn desk() -> Self {
        ModelConfig {
            layer_count: 2,
            hidden_dim: 48,
            mlp_hidden: 32,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::paper()
    }
}

/// Trained weights of the transition stack and the output head, plus the
/// lookback window width they were fitted for.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<R> {
    pub gru: GruStackParams<R>,
    pub mlp: MlpParams<R>,
    pub window_m: usize,
    pub hidden_dim: usize,
}

impl<R: Real> ModelParams<R> {
    pub fn init<T: Rng>(cfg: ModelConfig, window_m: usize, rng: &mut T) -> Self {
        ModelParams {
            gru: GruStackParams::init(cfg.layer_count, window_m, cfg.hidden_dim, rng),
            mlp: MlpParams::init(cfg.hidden_dim, cfg.mlp_hidden, window_m, rng),
            window_m,
            hidden_dim: cfg.hidden_dim,
        }
    }

    pub fn zeros(cfg: ModelConfig, window_m: usize) -> Self {
        ModelParams {
            gru: GruStackParams::zeros(cfg.layer_count, window_m, cfg.hidden_dim),
            mlp: MlpParams::zeros(cfg.hidden_dim, cfg.mlp_hidden, window_m),
            window_m,
            hidden_dim: cfg.hidden_dim,
        }
    }

    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            layer_count: self.gru.layer_count(),
            hidden_dim: self.hidden_dim,
            mlp_hidden: self.mlp.w_hidden.rows(),
        }
    }

    pub(crate) fn mlp_param_base(&self) -> usize {
        self.gru.layer_count() * crate::nn::gru_tensors_per_layer()
    }

    /// Fresh generation state: per-layer hidden vectors drawn from a seeded
    /// normal scaled by 0.01, positioned before the first (empty) row.
    pub fn init_state<T: Rng>(&self, rng: &mut T) -> GenerationState<R> {
        self.init_state_scaled(0.01, rng)
    }

    pub fn init_state_scaled<T: Rng>(&self, scale: f64, rng: &mut T) -> GenerationState<R> {
        let hidden = (0..self.gru.layer_count())
            .map(|_| {
                (0..self.hidden_dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        R::of(z * scale)
                    })
                    .collect()
            })
            .collect();
        GenerationState { step: 1, hidden }
    }

    /// Advance the state by one row (windowed layout, width `M`).
    pub fn transition(
        &self,
        state: &GenerationState<R>,
        row: &[R],
    ) -> Result<GenerationState<R>, GrnnError> {
        if row.len() != self.window_m {
            return Err(GrnnError::WindowMismatch(row.len(), self.window_m));
        }
        let hidden = self.gru.forward(&state.hidden, row)?;
        Ok(GenerationState {
            step: state.step + 1,
            hidden,
        })
    }

    /// Probability row for the node at `state.step` (windowed layout; entry
    /// `w` is the edge probability to the node `w + 1` positions back).
    /// Positions beyond the current prefix are meaningless and ignored by
    /// callers.
    pub fn edge_probabilities(&self, state: &GenerationState<R>) -> Result<Vec<R>, GrnnError> {
        let h_top = state
            .hidden
            .last()
            .ok_or_else(|| NnError::ShapeMismatch("empty hidden stack".into()))?;
        Ok(self.mlp.forward(h_top)?)
    }

    /// Teacher-forced log-likelihood of a fully known sequence, starting
    /// from `state0`. Sums `s·ln(phi) + (1-s)·ln(1-phi)` over every in-window
    /// entry of rows 2..n; always non-positive.
    pub fn sequence_log_likelihood(
        &self,
        seq: &AdjacencySequence,
        state0: &GenerationState<R>,
    ) -> Result<R, GrnnError> {
        if !seq.is_fully_known() {
            return Err(GrnnError::UnknownEntries);
        }
        let mut state = state0.clone();
        let mut total = R::zero();
        for k in 1..seq.len() {
            let input = window_row(seq.row(k - 1), self.window_m)?;
            state = self.transition(&state, &input)?;
            let phi = self.edge_probabilities(&state)?;
            total += row_log_likelihood(seq.row(k), &phi, self.window_m);
        }
        Ok(total)
    }

    /// Unconditional autoregressive sample of an `n`-node graph.
    pub fn sample_graph<T: Rng>(&self, n: usize, rng: &mut T) -> Result<Graph, GrnnError> {
        let mut state = self.init_state(rng);
        let mut rows: Vec<Vec<SeqEntry>> = vec![Vec::new()];
        for k in 1..n {
            let input = window_row(&rows[k - 1], self.window_m)?;
            state = self.transition(&state, &input)?;
            let phi = self.edge_probabilities(&state)?;
            rows.push(sample_row(k, &phi, self.window_m, rng));
        }
        let seq = AdjacencySequence::from_rows(rows)?;
        let ord = NodeOrdering::identity(n);
        Ok(decode_sequence(&seq, &ord)?)
    }
}

impl<R: Real> ParamBlock<R> for ModelParams<R> {
    fn param_views(&self) -> Vec<TensorView<'_, R>> {
        let mut v = self.gru.param_views();
        v.extend(self.mlp.param_views());
        v
    }

    fn param_views_mut(&mut self) -> Vec<TensorViewMut<'_, R>> {
        let mut v = self.gru.param_views_mut();
        v.extend(self.mlp.param_views_mut());
        v
    }
}

/// Evolving inference state: the 1-based index of the next row to predict
/// and the per-layer hidden vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationState<R> {
    pub step: usize,
    pub hidden: Vec<Vec<R>>,
}

/// Training schedule. The published run uses 32,000 batches; `desk()` cuts
/// that to 2,000 so the benchmark suite finishes in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub total_batches: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub orderings_per_graph: usize,
    /// BFS orderings sampled per graph when fitting the window width.
    pub window_samples_per_graph: usize,
}

impl TrainConfig {
    pub fn desk(seed: u64) -> Self {
        TrainConfig {
            total_batches: 2_000,
            seed,
            ..TrainConfig::default()
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            total_batches: 32_000,
            learning_rate: 0.001,
            seed: 0,
            orderings_per_graph: 1,
            window_samples_per_graph: 4,
        }
    }
}

/// Convert a full-length adjacency row (position layout) into the fixed
/// window layout: entry `w` is the value `w + 1` positions back, zero-padded
/// past the start of the row.
pub fn window_row<R: Real>(row: &[SeqEntry], m: usize) -> Result<Vec<R>, GrnnError> {
    let mut out = vec![R::zero(); m];
    for (w, slot) in out.iter_mut().enumerate().take(row.len().min(m)) {
        match row[row.len() - 1 - w] {
            SeqEntry::One => *slot = R::one(),
            SeqEntry::Zero => {}
            SeqEntry::Unknown => return Err(GrnnError::UnknownEntries),
        }
    }
    Ok(out)
}

/// Validity mask companion to [`window_row`]: ones on the first
/// `min(row_len, m)` window slots.
pub fn window_mask<R: Real>(row_len: usize, m: usize) -> Vec<R> {
    let mut out = vec![R::zero(); m];
    for slot in out.iter_mut().take(row_len.min(m)) {
        *slot = R::one();
    }
    out
}

/// Window slot holding the probability of an edge between ordering position
/// `pos` and the row of position `row` (both 0-based); `None` when the pair
/// is farther apart than the window reaches.
pub fn phi_slot(row: usize, pos: usize, m: usize) -> Option<usize> {
    debug_assert!(pos < row);
    let lookback = row - pos;
    (lookback <= m).then(|| lookback - 1)
}

/// Log-likelihood contribution of one known row against a probability row.
fn row_log_likelihood<R: Real>(row: &[SeqEntry], phi: &[R], m: usize) -> R {
    let k = row.len();
    let mut acc = R::zero();
    for (j, entry) in row.iter().enumerate() {
        let Some(slot) = phi_slot(k, j, m) else {
            continue;
        };
        let p = phi[slot];
        match entry {
            SeqEntry::One => acc += p.ln(),
            SeqEntry::Zero => acc += (R::one() - p).ln(),
            SeqEntry::Unknown => unreachable!("checked by caller"),
        }
    }
    acc
}

/// Bernoulli-sample a row of index `k` (0-based) from a probability row.
/// Entries beyond the window are structural zeros.
fn sample_row<R: Real, T: Rng>(k: usize, phi: &[R], m: usize, rng: &mut T) -> Vec<SeqEntry> {
    (0..k)
        .map(|j| match phi_slot(k, j, m) {
            Some(slot) => SeqEntry::from_bit(rng.gen::<f64>() < phi[slot].as_f64()),
            None => SeqEntry::Zero,
        })
        .collect()
}

/// Window width fitted to the training corpus: the maximum BFS bandwidth
/// (largest lookback to a 1-entry) over `samples_per_graph` sampled BFS
/// orderings of each graph, floored at 8.
pub fn fit_window<T: Rng>(
    graphs: &[Graph],
    samples_per_graph: usize,
    rng: &mut T,
) -> Result<usize, GrnnError> {
    if graphs.is_empty() {
        return Err(GrnnError::EmptyTrainingSet);
    }
    let mut bandwidth = 0usize;
    for g in graphs {
        if g.node_count() == 0 {
            continue;
        }
        for _ in 0..samples_per_graph.max(1) {
            let start = rng.gen_range(0..g.node_count());
            let ord = bfs_ordering(g, start, rng)?;
            let seq = encode_sequence(g, &ord)?;
            bandwidth = bandwidth.max(sequence_bandwidth(&seq));
        }
    }
    Ok(bandwidth.max(8))
}

/// Largest lookback distance to a 1-entry over all rows.
pub fn sequence_bandwidth(seq: &AdjacencySequence) -> usize {
    let mut best = 0usize;
    for (k, row) in seq.rows().iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if matches!(entry, SeqEntry::One) {
                best = best.max(k - j);
            }
        }
    }
    best
}

/// Baseline completion: teacher-force the observed rows under a random BFS
/// ordering of `G_O`, then sample rows for each missing node and take the
/// union with the observed edges.
pub fn vgraphrnn_complete<R: Real, T: Rng>(
    params: &ModelParams<R>,
    obs: &PartialObservation,
    rng: &mut T,
) -> Result<Graph, GrnnError> {
    let n_obs = obs.observed.node_count();
    let n = obs.total_nodes();
    let start = rng.gen_range(0..n_obs.max(1));
    let obs_ord = bfs_ordering(&obs.observed, start, rng)?;
    let obs_seq = encode_sequence(&obs.observed, &obs_ord)?;

    let mut state = params.init_state(rng);
    let mut rows: Vec<Vec<SeqEntry>> = Vec::with_capacity(n);
    rows.push(Vec::new());
    for k in 1..n_obs {
        rows.push(obs_seq.row(k).to_vec());
    }
    for k in 1..n {
        let input = window_row(&rows[k - 1], params.window_m)?;
        state = params.transition(&state, &input)?;
        if k < n_obs {
            continue; // teacher forcing over the observed prefix
        }
        let phi = params.edge_probabilities(&state)?;
        rows.push(sample_row(k, &phi, params.window_m, rng));
    }

    // Completed ordering: observed BFS order, then placeholders.
    let mut order: Vec<usize> = obs_ord.as_order().to_vec();
    order.extend(n_obs..n);
    let ord = NodeOrdering::from_order(order)?;
    let seq = AdjacencySequence::from_rows(rows)?;
    let mut g = decode_sequence(&seq, &ord)?;
    for (u, v) in obs.observed.edges() {
        g.add_edge(u, v)?;
    }
    Ok(g)
}
