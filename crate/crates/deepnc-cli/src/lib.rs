//! Library surface of the experiment driver, so integration tests can call
//! the subcommands in-process.

pub mod baseline;
pub mod commands;
pub mod config;

pub use commands::{
    cmd_complete, cmd_evaluate, cmd_generate, cmd_scale_bench, cmd_train, CorpusKind,
    EvaluationSummary, ScaleBenchConfig,
};
pub use config::{ExperimentConfig, Method};
