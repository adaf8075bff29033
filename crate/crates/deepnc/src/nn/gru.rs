//! Stacked gated recurrent unit.
//!
//! Per layer, with `x` the layer input and `h` its previous hidden state:
//!
//! ```text
//! z  = sigmoid(Wz x + Uz h + bz)        update gate
//! r  = sigmoid(Wr x + Ur h + br)        reset gate
//! c  = tanh(Wc x + Uc (r ∘ h) + bc)     candidate
//! h' = z ∘ h + (1 - z) ∘ c
//! ```
//!
//! so a zero update gate hands the candidate straight through. Layer 1 takes
//! the external input; deeper layers take the hidden state below. The plain
//! and taped forward passes share the same kernels in the same order, so
//! their outputs are bitwise identical.

use super::linalg::Matrix;
use super::params::{ParamBlock, TensorView, TensorViewMut};
use super::tape::{add_vec, hadamard_vec, one_minus_vec, sigmoid_vec, tanh_vec, NodeId, Tape};
use super::NnError;
use crate::real::Real;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GruLayer<R> {
    pub w_update: Matrix<R>,
    pub u_update: Matrix<R>,
    pub b_update: Vec<R>,
    pub w_reset: Matrix<R>,
    pub u_reset: Matrix<R>,
    pub b_reset: Vec<R>,
    pub w_cand: Matrix<R>,
    pub u_cand: Matrix<R>,
    pub b_cand: Vec<R>,
}

impl<R: Real> GruLayer<R> {
    fn init<T: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut T) -> Self {
        GruLayer {
            w_update: Matrix::uniform_init(hidden_dim, input_dim, rng),
            u_update: Matrix::uniform_init(hidden_dim, hidden_dim, rng),
            b_update: vec![R::zero(); hidden_dim],
            w_reset: Matrix::uniform_init(hidden_dim, input_dim, rng),
            u_reset: Matrix::uniform_init(hidden_dim, hidden_dim, rng),
            b_reset: vec![R::zero(); hidden_dim],
            w_cand: Matrix::uniform_init(hidden_dim, input_dim, rng),
            u_cand: Matrix::uniform_init(hidden_dim, hidden_dim, rng),
            b_cand: vec![R::zero(); hidden_dim],
        }
    }

    fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        GruLayer {
            w_update: Matrix::zeros(hidden_dim, input_dim),
            u_update: Matrix::zeros(hidden_dim, hidden_dim),
            b_update: vec![R::zero(); hidden_dim],
            w_reset: Matrix::zeros(hidden_dim, input_dim),
            u_reset: Matrix::zeros(hidden_dim, hidden_dim),
            b_reset: vec![R::zero(); hidden_dim],
            w_cand: Matrix::zeros(hidden_dim, input_dim),
            u_cand: Matrix::zeros(hidden_dim, hidden_dim),
            b_cand: vec![R::zero(); hidden_dim],
        }
    }

    fn step(&self, h: &[R], x: &[R]) -> Vec<R> {
        let zx = self.w_update.matvec(x);
        let zh = self.u_update.matvec(h);
        let z = sigmoid_vec(&add_vec(&add_vec(&zx, &zh), &self.b_update));

        let rx = self.w_reset.matvec(x);
        let rh = self.u_reset.matvec(h);
        let r = sigmoid_vec(&add_vec(&add_vec(&rx, &rh), &self.b_reset));

        let gated = hadamard_vec(&r, h);
        let cx = self.w_cand.matvec(x);
        let ch = self.u_cand.matvec(&gated);
        let c = tanh_vec(&add_vec(&add_vec(&cx, &ch), &self.b_cand));

        let keep = hadamard_vec(&z, h);
        let fresh = hadamard_vec(&one_minus_vec(&z), &c);
        add_vec(&keep, &fresh)
    }
}

/// Number of tensors each layer contributes to the parameter list.
pub(crate) const TENSORS_PER_LAYER: usize = 9;

/// A stack of GRU layers: layer 1 reads the `input_dim`-wide row, deeper
/// layers read the hidden state below them.
#[derive(Debug, Clone, PartialEq)]
pub struct GruStackParams<R> {
    pub layers: Vec<GruLayer<R>>,
    pub input_dim: usize,
    pub hidden_dim: usize,
}

impl<R: Real> GruStackParams<R> {
    pub fn init<T: Rng>(layer_count: usize, input_dim: usize, hidden_dim: usize, rng: &mut T) -> Self {
        let layers = (0..layer_count)
            .map(|l| {
                let in_dim = if l == 0 { input_dim } else { hidden_dim };
                GruLayer::init(in_dim, hidden_dim, rng)
            })
            .collect();
        GruStackParams {
            layers,
            input_dim,
            hidden_dim,
        }
    }

    pub fn zeros(layer_count: usize, input_dim: usize, hidden_dim: usize) -> Self {
        let layers = (0..layer_count)
            .map(|l| {
                let in_dim = if l == 0 { input_dim } else { hidden_dim };
                GruLayer::zeros(in_dim, hidden_dim)
            })
            .collect();
        GruStackParams {
            layers,
            input_dim,
            hidden_dim,
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    fn check_shapes(&self, h_prev: &[Vec<R>], x: &[R]) -> Result<(), NnError> {
        if x.len() != self.input_dim {
            return Err(NnError::ShapeMismatch(format!(
                "input width {} != {}",
                x.len(),
                self.input_dim
            )));
        }
        if h_prev.len() != self.layers.len() {
            return Err(NnError::ShapeMismatch(format!(
                "hidden layer count {} != {}",
                h_prev.len(),
                self.layers.len()
            )));
        }
        for (l, h) in h_prev.iter().enumerate() {
            if h.len() != self.hidden_dim {
                return Err(NnError::ShapeMismatch(format!(
                    "layer {l} hidden width {} != {}",
                    h.len(),
                    self.hidden_dim
                )));
            }
        }
        Ok(())
    }

    /// One recurrence step: returns the new per-layer hidden vectors.
    pub fn forward(&self, h_prev: &[Vec<R>], x: &[R]) -> Result<Vec<Vec<R>>, NnError> {
        self.check_shapes(h_prev, x)?;
        let mut out = Vec::with_capacity(self.layers.len());
        let mut input = x.to_vec();
        for (layer, h) in self.layers.iter().zip(h_prev) {
            let h_new = layer.step(h, &input);
            input = h_new.clone();
            out.push(h_new);
        }
        Ok(out)
    }

    /// Tape-recorded step. `params` must be the full model parameter list;
    /// `base` is the index of this stack's first tensor within it.
    pub fn forward_tape(
        &self,
        tape: &mut Tape<R>,
        params: &[TensorView<'_, R>],
        base: usize,
        h_prev: &[NodeId],
        x: NodeId,
    ) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut input = x;
        for (l, _) in self.layers.iter().enumerate() {
            let p = base + l * TENSORS_PER_LAYER;
            let h = h_prev[l];

            let zx = tape.matvec(params, p, input);
            let zh = tape.matvec(params, p + 1, h);
            let zsum = tape.add(zx, zh);
            let zb = tape.add_param(params, zsum, p + 2);
            let z = tape.sigmoid(zb);

            let rx = tape.matvec(params, p + 3, input);
            let rh = tape.matvec(params, p + 4, h);
            let rsum = tape.add(rx, rh);
            let rb = tape.add_param(params, rsum, p + 5);
            let r = tape.sigmoid(rb);

            let gated = tape.hadamard(r, h);
            let cx = tape.matvec(params, p + 6, input);
            let ch = tape.matvec(params, p + 7, gated);
            let csum = tape.add(cx, ch);
            let cb = tape.add_param(params, csum, p + 8);
            let c = tape.tanh(cb);

            let keep = tape.hadamard(z, h);
            let inv = tape.one_minus(z);
            let fresh = tape.hadamard(inv, c);
            let h_new = tape.add(keep, fresh);

            input = h_new;
            out.push(h_new);
        }
        out
    }
}

impl<R: Real> ParamBlock<R> for GruStackParams<R> {
    fn param_views(&self) -> Vec<TensorView<'_, R>> {
        let mut v = Vec::with_capacity(self.layers.len() * TENSORS_PER_LAYER);
        for l in &self.layers {
            v.push(TensorView::Mat(&l.w_update));
            v.push(TensorView::Mat(&l.u_update));
            v.push(TensorView::Vec(&l.b_update));
            v.push(TensorView::Mat(&l.w_reset));
            v.push(TensorView::Mat(&l.u_reset));
            v.push(TensorView::Vec(&l.b_reset));
            v.push(TensorView::Mat(&l.w_cand));
            v.push(TensorView::Mat(&l.u_cand));
            v.push(TensorView::Vec(&l.b_cand));
        }
        v
    }

    fn param_views_mut(&mut self) -> Vec<TensorViewMut<'_, R>> {
        let mut v = Vec::with_capacity(self.layers.len() * TENSORS_PER_LAYER);
        for l in &mut self.layers {
            v.push(TensorViewMut::Mat(&mut l.w_update));
            v.push(TensorViewMut::Mat(&mut l.u_update));
            v.push(TensorViewMut::Vec(&mut l.b_update));
            v.push(TensorViewMut::Mat(&mut l.w_reset));
            v.push(TensorViewMut::Mat(&mut l.u_reset));
            v.push(TensorViewMut::Vec(&mut l.b_reset));
            v.push(TensorViewMut::Mat(&mut l.w_cand));
            v.push(TensorViewMut::Mat(&mut l.u_cand));
            v.push(TensorViewMut::Vec(&mut l.b_cand));
        }
        v
    }
}
