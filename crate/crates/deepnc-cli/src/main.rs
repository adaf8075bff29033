use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use deepnc_cli::commands::{self, CorpusKind, ScaleBenchConfig};
use deepnc_cli::config::ExperimentConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "deepnc", about = "Network completion experiments", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic corpus of edge lists plus a manifest.
    Generate(GenerateArgs),
    /// Train the sequence model on the manifest's training graphs.
    Train(TrainArgs),
    /// Corrupt the test graph and run every configured completion method.
    Complete(CompleteArgs),
    /// Score completed runs and emit metrics.csv / summary.csv.
    Evaluate(EvaluateArgs),
    /// Time the EM completion across a size grid and fit the log-log slope.
    ScaleBench(ScaleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory for graph files and manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Corpus family: "ba" or "planted".
    #[arg(long, default_value = "ba")]
    kind: String,
    /// Total number of graphs.
    #[arg(long, default_value_t = 150)]
    count: usize,
    /// How many of the trailing graphs take the test role.
    #[arg(long, default_value_t = 1)]
    test_count: usize,
    #[arg(long, default_value_t = 100)]
    n_min: usize,
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    /// Attachment count (ba only).
    #[arg(long, default_value_t = 4)]
    attach: usize,
    /// Community count (planted only).
    #[arg(long, default_value_t = 4)]
    communities: usize,
    /// Within-community edge probability (planted only).
    #[arg(long, default_value_t = 0.2)]
    p_in: f64,
    /// Cross-community edge probability (planted only).
    #[arg(long, default_value_t = 0.02)]
    p_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to <output_dir>/checkpoint.json.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Override the test graph (edge-list file).
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    /// Comma-separated total node counts, e.g. 200,400,600,800,1000.
    #[arg(long, value_delimiter = ',', default_values_t = vec![200, 400, 600, 800, 1000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    attach: usize,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 300)]
    train_batches: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Generate(a) => {
            let kind = match a.kind.as_str() {
                "ba" => CorpusKind::Ba { attach: a.attach },
                "planted" => CorpusKind::Planted {
                    communities: a.communities,
                    p_in: a.p_in,
                    p_out: a.p_out,
                },
                other => anyhow::bail!("unknown corpus kind {other:?} (use ba or planted)"),
            };
            let manifest = commands::cmd_generate(
                &a.out, kind, a.count, a.test_count, a.n_min, a.n_max, a.seed,
            )?;
            println!(
                "wrote {} graphs ({} train, {} test) under {}",
                a.count,
                manifest.train.len(),
                manifest.test.len(),
                a.out.display()
            );
        }
        Cmd::Train(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            let report = commands::cmd_train(&config)?;
            println!(
                "trained: window M = {}, final loss = {:.6}, checkpoint at {}",
                report.window_m,
                report.final_loss,
                config.checkpoint_path().display()
            );
        }
        Cmd::Complete(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            let checkpoint = a.checkpoint.unwrap_or_else(|| config.checkpoint_path());
            commands::cmd_complete(&config, &checkpoint, a.graph.as_deref())?;
            println!(
                "completed {} repetitions x {} methods under {}",
                config.repetitions,
                config.methods.len(),
                config.runs_dir().display()
            );
        }
        Cmd::Evaluate(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            let summary = commands::cmd_evaluate(&config, a.graph.as_deref())?;
            println!("method,runs,mean_normalized_ged,sd_normalized_ged");
            for row in &summary.rows {
                println!(
                    "{},{},{:.4},{:.4}",
                    row.method, row.runs, row.mean_normalized, row.sd_normalized
                );
            }
        }
        Cmd::ScaleBench(a) => {
            let cfg = ScaleBenchConfig {
                sizes: a.sizes,
                attach: a.attach,
                repetitions: a.reps,
                train_batches: a.train_batches,
                output_dir: a.out,
                seed: a.seed,
                ..ScaleBenchConfig::default()
            };
            let report = commands::cmd_scale_bench(&cfg)?;
            for p in &report.points {
                println!(
                    "n_total {} (observed {}): {:.3}s",
                    p.n_total, p.n_observed, p.mean_seconds
                );
            }
            println!("log-log slope: {:.3}", report.slope);
        }
    }
    Ok(())
}
