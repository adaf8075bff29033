//! Two-layer perceptron head: tanh hidden layer, clamped sigmoid output.

use super::linalg::Matrix;
use super::params::{ParamBlock, TensorView, TensorViewMut};
use super::tape::{add_vec, clamp_prob_vec, sigmoid_vec, tanh_vec, NodeId, Tape};
use super::NnError;
use crate::real::Real;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<R> {
    pub w_hidden: Matrix<R>,
    pub b_hidden: Vec<R>,
    pub w_out: Matrix<R>,
    pub b_out: Vec<R>,
}

impl<R: Real> MlpParams<R> {
    pub fn init<T: Rng>(input_dim: usize, hidden_width: usize, out_width: usize, rng: &mut T) -> Self {
        MlpParams {
            w_hidden: Matrix::uniform_init(hidden_width, input_dim, rng),
            b_hidden: vec![R::zero(); hidden_width],
            w_out: Matrix::uniform_init(out_width, hidden_width, rng),
            b_out: vec![R::zero(); out_width],
        }
    }

    pub fn zeros(input_dim: usize, hidden_width: usize, out_width: usize) -> Self {
        MlpParams {
            w_hidden: Matrix::zeros(hidden_width, input_dim),
            b_hidden: vec![R::zero(); hidden_width],
            w_out: Matrix::zeros(out_width, hidden_width),
            b_out: vec![R::zero(); out_width],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_hidden.cols()
    }

    pub fn out_width(&self) -> usize {
        self.w_out.rows()
    }

    /// Probability row in `[PROB_FLOOR, 1 - PROB_FLOOR]^out_width`.
    pub fn forward(&self, h: &[R]) -> Result<Vec<R>, NnError> {
        if h.len() != self.input_dim() {
            return Err(NnError::ShapeMismatch(format!(
                "mlp input width {} != {}",
                h.len(),
                self.input_dim()
            )));
        }
        let lin1 = self.w_hidden.matvec(h);
        let act = tanh_vec(&add_vec(&lin1, &self.b_hidden));
        let lin2 = self.w_out.matvec(&act);
        let sig = sigmoid_vec(&add_vec(&lin2, &self.b_out));
        Ok(clamp_prob_vec(&sig))
    }

    /// Tape-recorded forward pass; `base` indexes this block's first tensor.
    pub fn forward_tape(
        &self,
        tape: &mut Tape<R>,
        params: &[TensorView<'_, R>],
        base: usize,
        h: NodeId,
    ) -> NodeId {
        let lin1 = tape.matvec(params, base, h);
        let biased1 = tape.add_param(params, lin1, base + 1);
        let act = tape.tanh(biased1);
        let lin2 = tape.matvec(params, base + 2, act);
        let biased2 = tape.add_param(params, lin2, base + 3);
        let sig = tape.sigmoid(biased2);
        tape.clamp_prob(sig)
    }
}

impl<R: Real> ParamBlock<R> for MlpParams<R> {
    fn param_views(&self) -> Vec<TensorView<'_, R>> {
        vec![
            TensorView::Mat(&self.w_hidden),
            TensorView::Vec(&self.b_hidden),
            TensorView::Mat(&self.w_out),
            TensorView::Vec(&self.b_out),
        ]
    }

    fn param_views_mut(&mut self) -> Vec<TensorViewMut<'_, R>> {
        vec![
            TensorViewMut::Mat(&mut self.w_hidden),
            TensorViewMut::Vec(&mut self.b_hidden),
            TensorViewMut::Mat(&mut self.w_out),
            TensorViewMut::Vec(&mut self.b_out),
        ]
    }
}
