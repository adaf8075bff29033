//! Dense numerical kernel for the sequence model.
//!
//! This is deliberately minimal: row-major matrices, a GRU stack, a two-layer
//! perceptron with clamped sigmoid output, masked binary cross-entropy, an
//! explicit reverse-mode tape over that fixed operator set, and Adam. The
//! model graph is small and static, so nothing more general is needed.

mod adam;
mod gru;
mod linalg;
mod loss;
mod mlp;
mod params;
mod tape;

pub use adam::{adam_step, AdamState};
pub use gru::{GruLayer, GruStackParams};
pub use linalg::Matrix;
pub use loss::{bce_grad_scaled, bce_loss, bce_sum_and_count};
pub use mlp::MlpParams;
pub use params::{Grads, ParamBlock, TensorView, TensorViewMut};
pub use tape::{NodeId, Tape};

/// Tensors a GRU layer contributes to a parameter list (gate matrices,
/// recurrent matrices, biases).
pub fn gru_tensors_per_layer() -> usize {
    gru::TENSORS_PER_LAYER
}

use thiserror::Error;

/// Errors from the numeric kernel.
#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("loss mask selects no entries")]
    EmptyMask,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}
