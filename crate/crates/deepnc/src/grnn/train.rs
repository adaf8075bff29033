//! Teacher-forced minibatch training.

use super::{fit_window, window_mask, window_row, GrnnError, ModelConfig, ModelParams, TrainConfig};
use crate::graph::{bfs_ordering, encode_sequence, Graph};
use crate::nn::{adam_step, bce_grad_scaled, bce_sum_and_count, AdamState, Grads, ParamBlock, Tape};
use crate::real::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// What a training run produced besides the weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub loss_trace: Vec<f64>,
    pub window_m: usize,
    pub model: ModelConfig,
    pub config: TrainConfig,
}

impl TrainReport {
    /// Windowed-trend check: mean of the last tenth of the trace is below
    /// the mean of the first tenth.
    pub fn loss_trend_decreasing(&self) -> bool {
        let n = self.loss_trace.len();
        if n < 10 {
            return true;
        }
        let w = (n / 10).max(1);
        let head: f64 = self.loss_trace[..w].iter().sum::<f64>() / w as f64;
        let tail: f64 = self.loss_trace[n - w..].iter().sum::<f64>() / w as f64;
        tail < head
    }
}

/// One teacher-forcing job: the windowed inputs, targets, and masks of a
/// single BFS-ordered sequence, plus its initial hidden state.
struct SeqJob<R> {
    inputs: Vec<Vec<R>>,
    targets: Vec<Vec<R>>,
    masks: Vec<Vec<R>>,
    h0: Vec<Vec<R>>,
    masked_entries: usize,
}

fn build_job<R: Real>(
    model: &ModelParams<R>,
    g: &Graph,
    rng: &mut ChaCha8Rng,
) -> Result<SeqJob<R>, GrnnError> {
    let m = model.window_m;
    let start = rng.gen_range(0..g.node_count());
    let ord = bfs_ordering(g, start, rng)?;
    let seq = encode_sequence(g, &ord)?;
    let n = seq.len();
    let mut inputs = Vec::with_capacity(n - 1);
    let mut targets = Vec::with_capacity(n - 1);
    let mut masks = Vec::with_capacity(n - 1);
    let mut masked_entries = 0usize;
    for k in 1..n {
        inputs.push(window_row(seq.row(k - 1), m)?);
        let target = window_row(seq.row(k), m)?;
        let mask = window_mask::<R>(k, m);
        masked_entries += k.min(m);
        targets.push(target);
        masks.push(mask);
    }
    let h0 = model.init_state(rng).hidden;
    Ok(SeqJob {
        inputs,
        targets,
        masks,
        h0,
        masked_entries,
    })
}

/// Forward + reverse pass of one sequence; gradients are with respect to the
/// *global* masked mean, hence the external `scale = 1/total_count`.
fn job_grads<R: Real>(model: &ModelParams<R>, job: &SeqJob<R>, scale: R) -> (Grads<R>, R) {
    let params = model.param_views();
    let mlp_base = model.mlp_param_base();
    let mut tape = Tape::new();
    let mut h: Vec<_> = job.h0.iter().map(|v| tape.leaf(v.clone())).collect();
    let mut phis = Vec::with_capacity(job.inputs.len());
    for input in &job.inputs {
        let x = tape.leaf(input.clone());
        h = model.gru.forward_tape(&mut tape, &params, 0, &h, x);
        let phi = model.mlp.forward_tape(&mut tape, &params, mlp_base, *h.last().unwrap());
        phis.push(phi);
    }

    let mut loss_sum = R::zero();
    let mut seeds = Vec::with_capacity(phis.len());
    for (t, phi) in phis.iter().enumerate() {
        let probs = tape.value(*phi);
        let (sum, _) = bce_sum_and_count(probs, &job.targets[t], &job.masks[t])
            .expect("widths fixed by construction");
        loss_sum += sum;
        seeds.push((
            *phi,
            bce_grad_scaled(probs, &job.targets[t], &job.masks[t], scale),
        ));
    }

    let mut grads = Grads::zeros_like(&params);
    tape.backward(&params, seeds, &mut grads);
    (grads, loss_sum)
}

/// Train a model on BFS-ordered sequences of `graphs`.
///
/// Every batch draws fresh orderings (and fresh initial hidden states) from
/// the seeded stream, so reruns with the same config are bit-identical.
/// `total_batches = 0` returns the initialized weights untouched.
pub fn train<R: Real>(
    graphs: &[Graph],
    model_cfg: ModelConfig,
    cfg: &TrainConfig,
) -> Result<(ModelParams<R>, TrainReport), GrnnError> {
    if graphs.is_empty() {
        return Err(GrnnError::EmptyTrainingSet);
    }
    if !graphs.iter().any(|g| g.node_count() >= 2) {
        return Err(GrnnError::EmptyTrainingSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let window_m = fit_window(graphs, cfg.window_samples_per_graph, &mut rng)?;
    let mut model = ModelParams::<R>::init(model_cfg, window_m, &mut rng);

    let mut adam = AdamState::new(R::of(cfg.learning_rate), &model.param_views());
    let mut trace = Vec::with_capacity(cfg.total_batches);
    let mut cursor = 0usize;

    for _ in 0..cfg.total_batches {
        let mut jobs = Vec::with_capacity(cfg.batch_size);
        'fill: loop {
            let g = &graphs[cursor % graphs.len()];
            cursor += 1;
            if g.node_count() < 2 {
                continue;
            }
            for _ in 0..cfg.orderings_per_graph.max(1) {
                jobs.push(build_job(&model, g, &mut rng)?);
                if jobs.len() == cfg.batch_size {
                    break 'fill;
                }
            }
        }
        let total_count: usize = jobs.iter().map(|j| j.masked_entries).sum();
        let scale = R::one() / R::of(total_count as f64);

        let results: Vec<(Grads<R>, R)> = jobs
            .par_iter()
            .map(|job| job_grads(&model, job, scale))
            .collect();

        // Fixed-order reduction keeps results independent of scheduling.
        let mut grads = Grads::zeros_like(&model.param_views());
        let mut loss_sum = R::zero();
        for (g, l) in &results {
            grads.add_assign(g);
            loss_sum += *l;
        }
        trace.push((loss_sum / R::of(total_count as f64)).as_f64());

        adam_step(&mut adam, &mut model.param_views_mut(), &grads)?;
    }

    let report = TrainReport {
        loss_trace: trace,
        window_m,
        model: model_cfg,
        config: *cfg,
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SeqEntry;

    fn triangles(count: usize) -> Vec<Graph> {
        (0..count)
            .map(|_| Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap())
            .collect()
    }

    #[test]
    fn zero_batches_returns_initialized_params() {
        let graphs = triangles(4);
        let cfg = TrainConfig {
            total_batches: 0,
            seed: 7,
            ..TrainConfig::default()
        };
        let model_cfg = ModelConfig {
            layer_count: 1,
            hidden_dim: 4,
            mlp_hidden: 3,
        };
        let (a, report) = train::<f64>(&graphs, model_cfg, &cfg).unwrap();
        assert!(report.loss_trace.is_empty());

        // Same seed reproduces the same initialization.
        let (b, _) = train::<f64>(&graphs, model_cfg, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_training_set_rejected() {
        let cfg = TrainConfig::default();
        assert!(train::<f64>(&[], ModelConfig::desk(), &cfg).is_err());
        assert!(train::<f64>(&[Graph::new(1)], ModelConfig::desk(), &cfg).is_err());
    }

    #[test]
    fn triangle_corpus_learns_closure() {
        // Triangles always close: at step 3 both lookback entries are ones.
        let graphs = triangles(200);
        let cfg = TrainConfig {
            batch_size: 16,
            total_batches: 400,
            seed: 3,
            ..TrainConfig::default()
        };
        let model_cfg = ModelConfig {
            layer_count: 1,
            hidden_dim: 8,
            mlp_hidden: 8,
        };
        let (model, report) = train::<f64>(&graphs, model_cfg, &cfg).unwrap();
        assert!(report.loss_trend_decreasing());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = model.init_state(&mut rng);
        state = model
            .transition(&state, &window_row(&[], model.window_m).unwrap())
            .unwrap();
        state = model
            .transition(&state, &window_row(&[SeqEntry::One], model.window_m).unwrap())
            .unwrap();
        let phi3 = model.edge_probabilities(&state).unwrap();
        assert!(phi3[0] > 0.9, "lookback 1 at step 3: {}", phi3[0]);
        assert!(phi3[1] > 0.9, "lookback 2 at step 3: {}", phi3[1]);
    }

    #[test]
    fn training_is_deterministic() {
        let graphs = triangles(8);
        let cfg = TrainConfig {
            batch_size: 4,
            total_batches: 12,
            seed: 99,
            ..TrainConfig::default()
        };
        let model_cfg = ModelConfig {
            layer_count: 1,
            hidden_dim: 4,
            mlp_hidden: 4,
        };
        let (a, ra) = train::<f64>(&graphs, model_cfg, &cfg).unwrap();
        let (b, rb) = train::<f64>(&graphs, model_cfg, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.loss_trace, rb.loss_trace);
    }
}
