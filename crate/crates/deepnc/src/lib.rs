//! Completion of partially observable networks.
//!
//! Given an observed subgraph `G_O` and a known count of missing nodes, this
//! crate infers the full graph: it trains an autoregressive sequence model of
//! graphs on structurally similar training graphs, then runs a greedy
//! per-node inference (`deepnc-l`) or an expectation-maximization loop over
//! candidate missing edges (`deepnc-em`) to realize the most likely
//! completion.
//!
//! The crate is organized around the pipeline stages:
//!
//! * [`graph`] — simple undirected graphs, BFS node orderings, and the
//!   adjacency-row sequence representation the model consumes.
//! * [`nn`] — the dense numerical kernel: GRU stack, output perceptron,
//!   masked binary cross-entropy, reverse-mode gradients, Adam.
//! * [`grnn`] — the sequence model itself: training, stepwise inference,
//!   sequence likelihood, unconditional sampling.
//! * [`completion`] — the greedy and EM completion algorithms.
//! * [`data`] — synthetic generators, graph sampling, and the corruption
//!   pipeline that manufactures benchmark observations.
//! * [`metrics`] — graph edit distance (exact for tiny graphs, a
//!   bipartite-assignment upper bound otherwise) and structural statistics.
//!
//! All numeric code is generic over the scalar type through [`real::Real`];
//! the aliases below fix the default precision used by the CLI and tests.

pub mod completion;
pub mod data;
pub mod graph;
pub mod grnn;
pub mod metrics;
pub mod nn;
pub mod real;

pub use real::Real;

/// Default scalar for all shipped entry points. Everything is generic over
/// [`Real`], but 64-bit floats are what the checkpoints store and what the
/// reproducibility guarantees are stated for.
pub type Scalar = f64;

/// Model parameters at the default precision.
pub type Model = grnn::ModelParams<Scalar>;

/// Completion output at the default precision.
pub type Completion = completion::CompletionResult<Scalar>;
