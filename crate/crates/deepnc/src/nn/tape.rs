//! Explicit reverse-mode differentiation over a fixed operator set.
//!
//! A [`Tape`] records the forward computation as a flat list of vector-valued
//! nodes. Parameters are referenced by their index in the owning model's
//! [`super::ParamBlock`] ordering, so the backward pass writes straight into
//! a parallel [`Grads`] buffer. The operator set is exactly what the GRU
//! stack, the output perceptron, and the loss need: matrix-vector products,
//! additions, sigmoid, tanh, Hadamard products, `1 - x`, and the probability
//! clamp.

use super::linalg::outer_add;
use super::params::{Grads, TensorView};
use crate::real::{clamp_prob, Real, PROB_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

#[derive(Debug, Clone, Copy)]
enum Op {
    Leaf,
    MatVec { w: usize, x: NodeId },
    AddVec(NodeId, NodeId),
    AddParamVec { x: NodeId, b: usize },
    Sigmoid(NodeId),
    Tanh(NodeId),
    Hadamard(NodeId, NodeId),
    OneMinus(NodeId),
    ClampProb(NodeId),
}

struct TapeNode<R> {
    val: Vec<R>,
    op: Op,
}

/// Recorded forward computation.
pub struct Tape<R> {
    nodes: Vec<TapeNode<R>>,
}

pub(super) fn sigmoid_vec<R: Real>(x: &[R]) -> Vec<R> {
    x.iter()
        .map(|&v| R::one() / (R::one() + (-v).exp()))
        .collect()
}

pub(super) fn tanh_vec<R: Real>(x: &[R]) -> Vec<R> {
    x.iter().map(|&v| v.tanh()).collect()
}

pub(super) fn add_vec<R: Real>(a: &[R], b: &[R]) -> Vec<R> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub(super) fn hadamard_vec<R: Real>(a: &[R], b: &[R]) -> Vec<R> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

pub(super) fn one_minus_vec<R: Real>(a: &[R]) -> Vec<R> {
    a.iter().map(|&x| R::one() - x).collect()
}

pub(super) fn clamp_prob_vec<R: Real>(a: &[R]) -> Vec<R> {
    a.iter().map(|&x| clamp_prob(x)).collect()
}

impl<R: Real> Tape<R> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    fn push(&mut self, val: Vec<R>, op: Op) -> NodeId {
        self.nodes.push(TapeNode { val, op });
        NodeId(self.nodes.len() - 1)
    }

    pub fn value(&self, id: NodeId) -> &[R] {
        &self.nodes[id.0].val
    }

    /// Constant/input node; gradients stop here.
    pub fn leaf(&mut self, val: Vec<R>) -> NodeId {
        self.push(val, Op::Leaf)
    }

    /// `W x` where `w` indexes a matrix in the model's parameter list.
    pub fn matvec(&mut self, params: &[TensorView<'_, R>], w: usize, x: NodeId) -> NodeId {
        let TensorView::Mat(m) = params[w] else {
            panic!("param {w} is not a matrix");
        };
        let val = m.matvec(self.value(x));
        self.push(val, Op::MatVec { w, x })
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let val = add_vec(self.value(a), self.value(b));
        self.push(val, Op::AddVec(a, b))
    }

    /// `x + b` where `b` indexes a bias vector in the parameter list.
    pub fn add_param(&mut self, params: &[TensorView<'_, R>], x: NodeId, b: usize) -> NodeId {
        let TensorView::Vec(bias) = params[b] else {
            panic!("param {b} is not a vector");
        };
        let val = add_vec(self.value(x), bias);
        self.push(val, Op::AddParamVec { x, b })
    }

    pub fn sigmoid(&mut self, x: NodeId) -> NodeId {
        let val = sigmoid_vec(self.value(x));
        self.push(val, Op::Sigmoid(x))
    }

    pub fn tanh(&mut self, x: NodeId) -> NodeId {
        let val = tanh_vec(self.value(x));
        self.push(val, Op::Tanh(x))
    }

    pub fn hadamard(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let val = hadamard_vec(self.value(a), self.value(b));
        self.push(val, Op::Hadamard(a, b))
    }

    pub fn one_minus(&mut self, a: NodeId) -> NodeId {
        let val = one_minus_vec(self.value(a));
        self.push(val, Op::OneMinus(a))
    }

    /// Clamp into the stable probability range; gradient is blocked on
    /// entries that were clamped.
    pub fn clamp_prob(&mut self, x: NodeId) -> NodeId {
        let val = clamp_prob_vec(self.value(x));
        self.push(val, Op::ClampProb(x))
    }

    /// Reverse pass. `seeds` are `(node, adjoint)` pairs, e.g. the loss
    /// derivative with respect to each probability row. Parameter gradients
    /// are accumulated into `grads` (which must be shaped like `params`).
    pub fn backward(
        &self,
        params: &[TensorView<'_, R>],
        seeds: Vec<(NodeId, Vec<R>)>,
        grads: &mut Grads<R>,
    ) {
        let mut adj: Vec<Option<Vec<R>>> = vec![None; self.nodes.len()];
        for (id, seed) in seeds {
            debug_assert_eq!(seed.len(), self.nodes[id.0].val.len());
            match &mut adj[id.0] {
                Some(a) => {
                    for (x, y) in a.iter_mut().zip(&seed) {
                        *x += *y;
                    }
                }
                slot => *slot = Some(seed),
            }
        }

        for idx in (0..self.nodes.len()).rev() {
            let Some(g) = adj[idx].take() else {
                continue;
            };
            match self.nodes[idx].op {
                Op::Leaf => {}
                Op::MatVec { w, x } => {
                    let TensorView::Mat(m) = params[w] else {
                        panic!("param {w} is not a matrix");
                    };
                    outer_add(&g, &self.nodes[x.0].val, grads.buf_mut(w));
                    let dx = self.propagate(&mut adj, x, m.cols());
                    m.matvec_transpose_add(&g, dx);
                }
                Op::AddVec(a, b) => {
                    self.accumulate(&mut adj, a, &g);
                    self.accumulate(&mut adj, b, &g);
                }
                Op::AddParamVec { x, b } => {
                    for (slot, gv) in grads.buf_mut(b).iter_mut().zip(&g) {
                        *slot += *gv;
                    }
                    self.accumulate(&mut adj, x, &g);
                }
                Op::Sigmoid(x) => {
                    let y = &self.nodes[idx].val;
                    let dx: Vec<R> = y
                        .iter()
                        .zip(&g)
                        .map(|(&yv, &gv)| gv * yv * (R::one() - yv))
                        .collect();
                    self.accumulate(&mut adj, x, &dx);
                }
                Op::Tanh(x) => {
                    let y = &self.nodes[idx].val;
                    let dx: Vec<R> = y
                        .iter()
                        .zip(&g)
                        .map(|(&yv, &gv)| gv * (R::one() - yv * yv))
                        .collect();
                    self.accumulate(&mut adj, x, &dx);
                }
                Op::Hadamard(a, b) => {
                    let da = hadamard_vec(&g, &self.nodes[b.0].val);
                    let db = hadamard_vec(&g, &self.nodes[a.0].val);
                    self.accumulate(&mut adj, a, &da);
                    self.accumulate(&mut adj, b, &db);
                }
                Op::OneMinus(a) => {
                    let da: Vec<R> = g.iter().map(|&gv| -gv).collect();
                    self.accumulate(&mut adj, a, &da);
                }
                Op::ClampProb(x) => {
                    let lo = R::of(PROB_FLOOR);
                    let hi = R::one() - lo;
                    let raw = &self.nodes[x.0].val;
                    let dx: Vec<R> = raw
                        .iter()
                        .zip(&g)
                        .map(|(&xv, &gv)| {
                            if xv < lo || xv > hi {
                                R::zero()
                            } else {
                                gv
                            }
                        })
                        .collect();
                    self.accumulate(&mut adj, x, &dx);
                }
            }
        }
    }

    fn propagate<'s>(
        &self,
        adj: &'s mut [Option<Vec<R>>],
        id: NodeId,
        len: usize,
    ) -> &'s mut [R] {
        adj[id.0]
            .get_or_insert_with(|| vec![R::zero(); len])
            .as_mut_slice()
    }

    fn accumulate(&self, adj: &mut [Option<Vec<R>>], id: NodeId, g: &[R]) {
        match &mut adj[id.0] {
            Some(a) => {
                for (x, y) in a.iter_mut().zip(g) {
                    *x += *y;
                }
            }
            slot => *slot = Some(g.to_vec()),
        }
    }
}

impl<R: Real> Default for Tape<R> {
    fn default() -> Self {
        Self::new()
    }
}
