//! Flat parameter views shared by the tape, the optimizer, and checkpoints.
//!
//! A model exposes its tensors as an ordered list; gradients and optimizer
//! moments are parallel lists of flat buffers. The ordering is part of the
//! checkpoint contract, so implementations must keep it stable.

use super::linalg::Matrix;
use crate::real::Real;

/// Borrowed view of one parameter tensor.
#[derive(Debug, Clone, Copy)]
pub enum TensorView<'a, R> {
    Mat(&'a Matrix<R>),
    Vec(&'a [R]),
}

/// Mutable view of one parameter tensor.
#[derive(Debug)]
pub enum TensorViewMut<'a, R> {
    Mat(&'a mut Matrix<R>),
    Vec(&'a mut [R]),
}

impl<'a, R: Real> TensorView<'a, R> {
    pub fn len(&self) -> usize {
        match self {
            TensorView::Mat(m) => m.as_slice().len(),
            TensorView::Vec(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_slice(&self) -> &'a [R] {
        match self {
            TensorView::Mat(m) => m.as_slice(),
            TensorView::Vec(v) => v,
        }
    }
}

impl<'a, R: Real> TensorViewMut<'a, R> {
    pub fn as_mut_slice(&mut self) -> &mut [R] {
        match self {
            TensorViewMut::Mat(m) => m.as_mut_slice(),
            TensorViewMut::Vec(v) => v,
        }
    }
}

/// Anything holding trainable tensors in a stable order.
pub trait ParamBlock<R: Real> {
    fn param_views(&self) -> Vec<TensorView<'_, R>>;
    fn param_views_mut(&mut self) -> Vec<TensorViewMut<'_, R>>;
}

/// Gradient buffers parallel to a parameter list.
#[derive(Debug, Clone)]
pub struct Grads<R> {
    bufs: Vec<Vec<R>>,
}

impl<R: Real> Grads<R> {
    pub fn zeros_like(views: &[TensorView<'_, R>]) -> Self {
        Grads {
            bufs: views.iter().map(|v| vec![R::zero(); v.len()]).collect(),
        }
    }

    pub fn buf(&self, idx: usize) -> &[R] {
        &self.bufs[idx]
    }

    pub fn buf_mut(&mut self, idx: usize) -> &mut [R] {
        &mut self.bufs[idx]
    }

    pub fn tensor_count(&self) -> usize {
        self.bufs.len()
    }

    /// Element-wise accumulate another gradient set (fixed-order reduction).
    pub fn add_assign(&mut self, other: &Grads<R>) {
        assert_eq!(self.bufs.len(), other.bufs.len());
        for (a, b) in self.bufs.iter_mut().zip(&other.bufs) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }

    pub fn scale(&mut self, s: R) {
        for buf in &mut self.bufs {
            for x in buf.iter_mut() {
                *x *= s;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[R]> {
        self.bufs.iter().map(|b| b.as_slice())
    }

    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for buf in &self.bufs {
            for &x in buf {
                if x.abs() > m {
                    m = x.abs();
                }
            }
        }
        m
    }
}
