//! Model checkpoints: a self-describing JSON container with the dimensions,
//! every weight tensor in row-major order, and the training config. Values
//! are stored as `f64` regardless of the working scalar, so the format does
//! not depend on the precision the model ran at.

use super::{GrnnError, ModelConfig, ModelParams, TrainConfig};
use crate::nn::{NnError, ParamBlock, TensorView};
use crate::real::Real;
use serde::{Deserialize, Serialize};
use std::path::Path;

const FORMAT_TAG: &str = "deepnc-model";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorFile {
    rows: usize,
    /// Zero for bias vectors.
    cols: usize,
    data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    version: u32,
    layer_count: usize,
    hidden_dim: usize,
    mlp_hidden: usize,
    window_m: usize,
    train_config: Option<TrainConfig>,
    tensors: Vec<TensorFile>,
}

pub fn save_checkpoint<R: Real>(
    params: &ModelParams<R>,
    train_config: Option<&TrainConfig>,
    path: &Path,
) -> Result<(), GrnnError> {
    let cfg = params.config();
    let mut tensors = Vec::new();
    for view in params.param_views() {
        let (rows, cols, slice) = match view {
            TensorView::Mat(m) => (m.rows(), m.cols(), m.as_slice()),
            TensorView::Vec(v) => (v.len(), 0, v),
        };
        let data: Vec<f64> = slice.iter().map(|&x| x.as_f64()).collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(GrnnError::Nn(NnError::NonFinite("checkpoint tensor")));
        }
        tensors.push(TensorFile { rows, cols, data });
    }
    let file = CheckpointFile {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        layer_count: cfg.layer_count,
        hidden_dim: cfg.hidden_dim,
        mlp_hidden: cfg.mlp_hidden,
        window_m: params.window_m,
        train_config: train_config.copied(),
        tensors,
    };
    let text = serde_json::to_string(&file)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_checkpoint<R: Real>(
    path: &Path,
) -> Result<(ModelParams<R>, Option<TrainConfig>), GrnnError> {
    let text = std::fs::read_to_string(path)?;
    let file: CheckpointFile = serde_json::from_str(&text)?;
    if file.format != FORMAT_TAG {
        return Err(GrnnError::Checkpoint(format!(
            "unexpected format tag {:?}",
            file.format
        )));
    }
    if file.version != FORMAT_VERSION {
        return Err(GrnnError::Checkpoint(format!(
            "unsupported version {}",
            file.version
        )));
    }
    let cfg = ModelConfig {
        layer_count: file.layer_count,
        hidden_dim: file.hidden_dim,
        mlp_hidden: file.mlp_hidden,
    };
    let mut params = ModelParams::<R>::zeros(cfg, file.window_m);
    let mut views = params.param_views_mut();
    if views.len() != file.tensors.len() {
        return Err(GrnnError::Checkpoint(format!(
            "expected {} tensors, file has {}",
            views.len(),
            file.tensors.len()
        )));
    }
    for (idx, (view, tensor)) in views.iter_mut().zip(&file.tensors).enumerate() {
        let slot = view.as_mut_slice();
        if slot.len() != tensor.data.len() {
            return Err(GrnnError::Checkpoint(format!(
                "tensor {idx}: expected {} values, file has {}",
                slot.len(),
                tensor.data.len()
            )));
        }
        for (s, &v) in slot.iter_mut().zip(&tensor.data) {
            if !v.is_finite() {
                return Err(GrnnError::Nn(NnError::NonFinite("checkpoint tensor")));
            }
            *s = R::of(v);
        }
    }
    drop(views);
    Ok((params, file.train_config))
}
