//! The experiment driver behind each subcommand: training, completion runs,
//! scoring, corpus generation, and the runtime scaling benchmark.

use crate::baseline::random_attach_complete;
use crate::config::{sub_seed, ExperimentConfig, Method};
use anyhow::{bail, Context, Result};
use deepnc::completion::{deepnc_em, deepnc_l, CompletionResult, EmConfig, NodeType};
use deepnc::data::{corrupt, generate_ba, generate_planted_partition, CorruptionSpec, DatasetManifest, SamplerKind};
use deepnc::graph::{edge_list_string, parse_edge_list, Graph, PartialObservation};
use deepnc::grnn::{
    load_checkpoint, save_checkpoint, train, vgraphrnn_complete, ModelConfig, TrainConfig,
};
use deepnc::metrics::{approximate_ged, structure_report};
use deepnc::Model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing artifact")?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Training artifact next to the checkpoint: the loss trace, the fitted
/// window, and the settings that produced them.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrainArtifact {
    pub config_fingerprint: String,
    pub window_m: usize,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub final_loss: f64,
    pub loss_trend_decreasing: bool,
    pub loss_trace: Vec<f64>,
}

/// Train on the manifest's training graphs; write the checkpoint and the
/// training report into the output directory.
pub fn cmd_train(config: &ExperimentConfig) -> Result<TrainArtifact> {
    let manifest = DatasetManifest::load(&config.manifest)?;
    let base = config.manifest.parent().unwrap_or(Path::new("."));
    let (train_graphs, _) = manifest.load_graphs(base)?;
    if train_graphs.is_empty() {
        bail!("manifest lists no training graphs");
    }
    std::fs::create_dir_all(&config.output_dir)?;

    let (model, report) = train::<f64>(&train_graphs, config.model, &config.train)?;
    save_checkpoint(&model, Some(&config.train), &config.checkpoint_path())?;

    let artifact = TrainArtifact {
        config_fingerprint: config.fingerprint(),
        window_m: report.window_m,
        model: report.model,
        train: report.config,
        final_loss: report.loss_trace.last().copied().unwrap_or(f64::NAN),
        loss_trend_decreasing: report.loss_trend_decreasing(),
        loss_trace: report.loss_trace.clone(),
    };
    write_json(&config.train_report_path(), &artifact)?;
    Ok(artifact)
}

#[derive(Debug, Serialize, Deserialize)]
struct DecisionArtifact {
    position: usize,
    node: usize,
    node_type: NodeType,
    fallback_random: bool,
    frontier_scores: Vec<(usize, f64)>,
}

/// Per-run report: everything about one completion except wall time, which
/// lives in a sibling `timing.json` so reports stay byte-reproducible.
#[derive(Debug, Serialize, Deserialize)]
struct CompletionArtifact {
    config_fingerprint: String,
    method: Method,
    rep: usize,
    corruption_seed: u64,
    method_seed: u64,
    observed_nodes: usize,
    missing_nodes: usize,
    observed_edges: usize,
    recovered_edges: usize,
    ordering: Option<Vec<usize>>,
    em_trace: Vec<f64>,
    decisions: Option<Vec<DecisionArtifact>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TimingArtifact {
    seconds: f64,
}

/// Outcome of one method on one corrupted repetition.
pub struct MethodRun {
    pub method: Method,
    pub rep: usize,
    pub graph: Graph,
    pub seconds: f64,
    pub em_trace: Vec<f64>,
    pub completion: Option<CompletionResult<f64>>,
}

/// Run a single method on an observation, seeded.
pub fn run_method(
    method: Method,
    obs: &PartialObservation,
    model: &Model,
    em: &EmConfig,
    train_mean_degree: f64,
    seed: u64,
) -> Result<MethodRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let (graph, em_trace, completion) = match method {
        Method::DeepncL => {
            let r = deepnc_l(obs, model, &mut rng)?;
            (r.graph.clone(), Vec::new(), Some(r))
        }
        Method::DeepncEm => {
            let r = deepnc_em(obs, model, em, &mut rng)?;
            (r.graph.clone(), r.em_trace.clone(), Some(r))
        }
        Method::Vgraphrnn => (vgraphrnn_complete(model, obs, &mut rng)?, Vec::new(), None),
        Method::RandomAttach => (
            random_attach_complete(obs, train_mean_degree, &mut rng),
            Vec::new(),
            None,
        ),
    };
    Ok(MethodRun {
        method,
        rep: 0,
        graph,
        seconds: start.elapsed().as_secs_f64(),
        em_trace,
        completion,
    })
}

fn load_test_graph(config: &ExperimentConfig, graph_override: Option<&Path>) -> Result<Graph> {
    if let Some(path) = graph_override {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading graph {}", path.display()))?;
        let (g, _) = parse_edge_list(&text)?;
        return Ok(g.largest_component().0);
    }
    let manifest = DatasetManifest::load(&config.manifest)?;
    let base = config.manifest.parent().unwrap_or(Path::new("."));
    let (_, test) = manifest.load_graphs(base)?;
    test.into_iter().next().context("manifest has no test graph")
}

fn train_mean_degree(config: &ExperimentConfig) -> Result<f64> {
    let manifest = DatasetManifest::load(&config.manifest)?;
    let base = config.manifest.parent().unwrap_or(Path::new("."));
    let (train_graphs, _) = manifest.load_graphs(base)?;
    if train_graphs.is_empty() {
        bail!("manifest lists no training graphs");
    }
    Ok(train_graphs
        .iter()
        .map(|g| structure_report(g).mean_degree)
        .sum::<f64>()
        / train_graphs.len() as f64)
}

fn run_dir_name(rep: usize, method: Method) -> String {
    format!("rep{rep:03}-{method}")
}

/// Corrupt the test graph per repetition and run every configured method,
/// writing one directory of artifacts per (repetition, method).
pub fn cmd_complete(
    config: &ExperimentConfig,
    checkpoint: &Path,
    graph_override: Option<&Path>,
) -> Result<()> {
    let (model, _) = load_checkpoint::<f64>(checkpoint)?;
    let g_t = load_test_graph(config, graph_override)?;
    let mean_degree = train_mean_degree(config)?;
    let runs = config.runs_dir();
    std::fs::create_dir_all(&runs)?;
    let fingerprint = config.fingerprint();

    for rep in 0..config.repetitions {
        let corruption_seed = sub_seed(config.seed, "corrupt", rep as u64);
        let mut crng = ChaCha8Rng::seed_from_u64(corruption_seed);
        let (obs, _alignment) = corrupt(&g_t, &config.corruption, &mut crng)?;
        if obs.total_nodes() != g_t.node_count() {
            bail!(
                "node budget inconsistency: observation totals {} but the graph has {}",
                obs.total_nodes(),
                g_t.node_count()
            );
        }
        for &method in &config.methods {
            let method_seed = sub_seed(config.seed, method.as_str(), rep as u64);
            let mut run = run_method(method, &obs, &model, &config.em, mean_degree, method_seed)?;
            run.rep = rep;

            let dir = runs.join(run_dir_name(rep, method));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("recovered.edges"), edge_list_string(&run.graph))?;
            let artifact = CompletionArtifact {
                config_fingerprint: fingerprint.clone(),
                method,
                rep,
                corruption_seed,
                method_seed,
                observed_nodes: obs.observed.node_count(),
                missing_nodes: obs.missing_node_count,
                observed_edges: obs.observed.edge_count(),
                recovered_edges: run.graph.edge_count(),
                ordering: run
                    .completion
                    .as_ref()
                    .map(|c| c.ordering.as_order().to_vec()),
                em_trace: run.em_trace.clone(),
                decisions: run.completion.as_ref().map(|c| {
                    c.decisions
                        .iter()
                        .map(|d| DecisionArtifact {
                            position: d.position,
                            node: d.node,
                            node_type: d.node_type,
                            fallback_random: d.fallback_random,
                            frontier_scores: d.frontier_scores.clone(),
                        })
                        .collect()
                }),
            };
            write_json(&dir.join("completion.json"), &artifact)?;
            write_json(
                &dir.join("timing.json"),
                &TimingArtifact {
                    seconds: run.seconds,
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunScore {
    pub method: Method,
    pub rep: usize,
    pub cost: f64,
    pub normalized: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub runs: usize,
    pub mean_normalized: f64,
    /// Sample standard deviation (n - 1 denominator); zero for a single run.
    pub sd_normalized: f64,
}

#[derive(Debug, Serialize)]
pub struct EvaluationSummary {
    pub per_run: Vec<RunScore>,
    pub rows: Vec<SummaryRow>,
}

impl EvaluationSummary {
    pub fn mean_of(&self, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method)
            .map(|r| r.mean_normalized)
    }
}

/// Score completed runs against the test graph and emit `metrics.csv`
/// (per-run rows) and `summary.csv` (per-method mean ± sd).
pub fn cmd_evaluate(
    config: &ExperimentConfig,
    graph_override: Option<&Path>,
) -> Result<EvaluationSummary> {
    let g_t = load_test_graph(config, graph_override)?;
    let runs = config.runs_dir();
    if !runs.is_dir() {
        bail!("no completed runs under {}", runs.display());
    }

    let mut per_run = Vec::new();
    for rep in 0..config.repetitions {
        for &method in &config.methods {
            let dir = runs.join(run_dir_name(rep, method));
            let edges_path = dir.join("recovered.edges");
            if !edges_path.exists() {
                bail!("missing run {}", dir.display());
            }
            let (mut recovered, _) =
                parse_edge_list(&std::fs::read_to_string(&edges_path)?)?;
            // Isolated placeholder nodes do not appear in an edge list; the
            // completion artifact records the true node count.
            let artifact: CompletionArtifact =
                serde_json::from_str(&std::fs::read_to_string(dir.join("completion.json"))?)?;
            let total = artifact.observed_nodes + artifact.missing_nodes;
            if recovered.node_count() < total {
                let mut padded = Graph::new(total);
                for (u, v) in recovered.edges() {
                    padded.add_edge(u, v)?;
                }
                recovered = padded;
            }
            let timing: TimingArtifact =
                serde_json::from_str(&std::fs::read_to_string(dir.join("timing.json"))?)?;
            let ged = approximate_ged(&recovered, &g_t)?;
            per_run.push(RunScore {
                method,
                rep,
                cost: ged.cost,
                normalized: ged.normalized,
                seconds: timing.seconds,
            });
        }
    }

    let mut rows = Vec::new();
    for &method in &config.methods {
        let vals: Vec<f64> = per_run
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.normalized)
            .collect();
        let n = vals.len();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        rows.push(SummaryRow {
            method,
            runs: n,
            mean_normalized: mean,
            sd_normalized: sd,
        });
    }

    // metrics.csv: one row per run; wall time is the last column so
    // reproducibility checks can strip it.
    let mut csv = String::from("graph_id,method,rep,cost,normalized,runtime_s\n");
    for r in &per_run {
        csv.push_str(&format!(
            "test0,{},{},{},{},{}\n",
            r.method, r.rep, r.cost, r.normalized, r.seconds
        ));
    }
    std::fs::write(config.output_dir.join("metrics.csv"), csv)?;

    let mut csv = String::from("method,runs,mean_normalized_ged,sd_normalized_ged\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.method, r.runs, r.mean_normalized, r.sd_normalized
        ));
    }
    std::fs::write(config.output_dir.join("summary.csv"), csv)?;
    write_json(
        &config.output_dir.join("metrics.meta.json"),
        &serde_json::json!({
            "config_fingerprint": config.fingerprint(),
            "seed": config.seed,
            "columns": ["graph_id", "method", "rep", "cost", "normalized", "runtime_s"],
        }),
    )?;

    Ok(EvaluationSummary { per_run, rows })
}

/// What kind of corpus `generate` writes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorpusKind {
    Ba { attach: usize },
    Planted { communities: usize, p_in: f64, p_out: f64 },
}

/// Generate a synthetic corpus of edge-list files plus a manifest. The last
/// `test_count` graphs take the test role.
pub fn cmd_generate(
    out: &Path,
    kind: CorpusKind,
    count: usize,
    test_count: usize,
    n_min: usize,
    n_max: usize,
    seed: u64,
) -> Result<DatasetManifest> {
    if count == 0 || test_count == 0 || test_count >= count {
        bail!("need count > test_count >= 1 (got {count} / {test_count})");
    }
    if n_min > n_max || n_min == 0 {
        bail!("bad size range {n_min}..{n_max}");
    }
    std::fs::create_dir_all(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut paths = Vec::with_capacity(count);
    for i in 0..count {
        let n = rng.gen_range(n_min..=n_max);
        let g = match kind {
            CorpusKind::Ba { attach } => generate_ba(n, attach, &mut rng)?,
            CorpusKind::Planted {
                communities,
                p_in,
                p_out,
            } => generate_planted_partition(n, communities, p_in, p_out, &mut rng)?,
        };
        let name = format!("graph{i:03}.edges");
        std::fs::write(out.join(&name), edge_list_string(&g))?;
        paths.push(PathBuf::from(name));
    }
    let provenance = match kind {
        CorpusKind::Ba { attach } => format!("ba n={n_min}..{n_max} c={attach}"),
        CorpusKind::Planted {
            communities,
            p_in,
            p_out,
        } => format!("planted-partition n={n_min}..{n_max} k={communities} p_in={p_in} p_out={p_out}"),
    };
    let split = count - test_count;
    let manifest = DatasetManifest {
        train: paths[..split].to_vec(),
        test: paths[split..].to_vec(),
        provenance,
        seed,
    };
    manifest.save(&out.join("manifest.json"))?;
    Ok(manifest)
}

/// Scaling benchmark settings.
#[derive(Debug, Clone)]
pub struct ScaleBenchConfig {
    pub sizes: Vec<usize>,
    pub attach: usize,
    pub repetitions: usize,
    pub corruption: CorruptionSpec,
    pub model: ModelConfig,
    pub train_batches: usize,
    pub em: EmConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ScaleBenchConfig {
    fn default() -> Self {
        ScaleBenchConfig {
            sizes: (1..=5).map(|i| i * 200).collect(),
            attach: 2,
            repetitions: 3,
            corruption: CorruptionSpec {
                sampler: SamplerKind::RandomNode,
                ..CorruptionSpec::default()
            },
            model: ModelConfig::desk(),
            train_batches: 300,
            // A threshold this small never triggers, so every size runs the
            // same number of EM iterations and timings stay comparable.
            em: EmConfig {
                threshold: 1e-12,
                ..EmConfig::default()
            },
            output_dir: PathBuf::from("scale-out"),
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScalePoint {
    pub n_total: usize,
    pub n_observed: usize,
    pub mean_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct ScaleReport {
    pub attach: usize,
    pub slope: f64,
    pub points: Vec<ScalePoint>,
    pub seed: u64,
}

/// Time the EM completion across a size grid of preferential-attachment
/// graphs and fit the log-log slope of runtime against the observed node
/// count.
pub fn cmd_scale_bench(cfg: &ScaleBenchConfig) -> Result<ScaleReport> {
    if cfg.sizes.len() < 3 {
        bail!(
            "size grid needs at least 3 points for a meaningful fit, got {}",
            cfg.sizes.len()
        );
    }
    std::fs::create_dir_all(&cfg.output_dir)?;

    // Training corpus spans the grid so the fitted window covers the
    // largest graphs.
    let lo = *cfg.sizes.iter().min().unwrap();
    let hi = *cfg.sizes.iter().max().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, "scale-train-data", 0));
    let corpus: Vec<Graph> = (0..30)
        .map(|i| {
            let n = lo + (hi - lo) * i / 29;
            generate_ba(n, cfg.attach, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let train_cfg = TrainConfig {
        total_batches: cfg.train_batches,
        seed: sub_seed(cfg.seed, "scale-train", 0),
        ..TrainConfig::default()
    };
    let (model, _) = train::<f64>(&corpus, cfg.model, &train_cfg)?;

    let mut csv = String::from("c,n_total,n_observed,rep,seconds\n");
    let mut points = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        let mut gen_rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, "scale-graph", si as u64));
        let g_t = generate_ba(n, cfg.attach, &mut gen_rng)?;
        let mut total = 0.0;
        let mut n_observed = 0;
        for rep in 0..cfg.repetitions {
            let mut crng = ChaCha8Rng::seed_from_u64(sub_seed(
                cfg.seed,
                "scale-corrupt",
                (si * cfg.repetitions + rep) as u64,
            ));
            let (obs, _) = corrupt(&g_t, &cfg.corruption, &mut crng)?;
            n_observed = obs.observed.node_count();
            let mut mrng = ChaCha8Rng::seed_from_u64(sub_seed(
                cfg.seed,
                "scale-em",
                (si * cfg.repetitions + rep) as u64,
            ));
            let start = Instant::now();
            let _ = deepnc_em(&obs, &model, &cfg.em, &mut mrng)?;
            let secs = start.elapsed().as_secs_f64();
            total += secs;
            csv.push_str(&format!("{},{},{},{},{}\n", cfg.attach, n, n_observed, rep, secs));
        }
        points.push(ScalePoint {
            n_total: n,
            n_observed,
            mean_seconds: total / cfg.repetitions as f64,
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| (p.n_observed as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_seconds.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);

    std::fs::write(cfg.output_dir.join("scale.csv"), csv)?;
    let report = ScaleReport {
        attach: cfg.attach,
        slope,
        points,
        seed: cfg.seed,
    };
    write_json(&cfg.output_dir.join("scale_report.json"), &report)?;
    Ok(report)
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
