//! Adam optimizer with bias correction.

use super::params::{Grads, TensorView, TensorViewMut};
use super::NnError;
use crate::real::Real;

#[derive(Debug, Clone)]
pub struct AdamState<R> {
    pub step: u64,
    pub learning_rate: R,
    pub beta1: R,
    pub beta2: R,
    pub epsilon: R,
    first_moment: Vec<Vec<R>>,
    second_moment: Vec<Vec<R>>,
}

impl<R: Real> AdamState<R> {
    /// Fresh state shaped like `views`, with the canonical defaults
    /// beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8.
    pub fn new(learning_rate: R, views: &[TensorView<'_, R>]) -> Self {
        AdamState {
            step: 0,
            learning_rate,
            beta1: R::of(0.9),
            beta2: R::of(0.999),
            epsilon: R::of(1e-8),
            first_moment: views.iter().map(|v| vec![R::zero(); v.len()]).collect(),
            second_moment: views.iter().map(|v| vec![R::zero(); v.len()]).collect(),
        }
    }
}

/// One Adam update over every parameter tensor. Increments the step count
/// and applies bias-corrected moment estimates.
pub fn adam_step<R: Real>(
    state: &mut AdamState<R>,
    params: &mut [TensorViewMut<'_, R>],
    grads: &Grads<R>,
) -> Result<(), NnError> {
    if params.len() != state.first_moment.len() || grads.tensor_count() != params.len() {
        return Err(NnError::ShapeMismatch(format!(
            "adam tensors: params {}, grads {}, state {}",
            params.len(),
            grads.tensor_count(),
            state.first_moment.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = R::one() - state.beta1.powi(t);
    let bc2 = R::one() - state.beta2.powi(t);
    for (idx, view) in params.iter_mut().enumerate() {
        let p = view.as_mut_slice();
        let g = grads.buf(idx);
        if p.len() != g.len() {
            return Err(NnError::ShapeMismatch(format!(
                "adam tensor {idx}: param {} vs grad {}",
                p.len(),
                g.len()
            )));
        }
        let m = &mut state.first_moment[idx];
        let v = &mut state.second_moment[idx];
        for i in 0..p.len() {
            m[i] = state.beta1 * m[i] + (R::one() - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (R::one() - state.beta2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] = p[i] - state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
        }
    }
    Ok(())
}
