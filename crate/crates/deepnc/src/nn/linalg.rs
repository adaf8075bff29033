//! Row-major dense matrix with the handful of kernels the model needs.

use crate::real::Real;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Real> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Seeded uniform init in `±1/sqrt(cols)` (fan-in scaling).
    pub fn uniform_init<T: Rng>(rows: usize, cols: usize, rng: &mut T) -> Self {
        let bound = 1.0 / (cols.max(1) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| R::of(rng.gen_range(-bound..bound)))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> R {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[R] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [R] {
        &mut self.data
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[R]) -> Vec<R> {
        assert_eq!(x.len(), self.cols, "matvec width");
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = R::zero();
            for (a, b) in row.iter().zip(x) {
                acc += *a * *b;
            }
            out.push(acc);
        }
        out
    }

    /// `out += self^T * g` (gradient w.r.t. the matvec input).
    pub fn matvec_transpose_add(&self, g: &[R], out: &mut [R]) {
        assert_eq!(g.len(), self.rows, "adjoint height");
        assert_eq!(out.len(), self.cols, "output width");
        for r in 0..self.rows {
            let gr = g[r];
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, w) in out.iter_mut().zip(row) {
                *o += *w * gr;
            }
        }
    }
}

/// `grad += g ⊗ x`, written into a flat row-major buffer shaped like the
/// matrix of a matvec (gradient w.r.t. the matrix).
pub fn outer_add<R: Real>(g: &[R], x: &[R], grad: &mut [R]) {
    assert_eq!(grad.len(), g.len() * x.len(), "outer shape");
    for (r, gr) in g.iter().enumerate() {
        let row = &mut grad[r * x.len()..(r + 1) * x.len()];
        for (slot, xv) in row.iter_mut().zip(x) {
            *slot += *gr * *xv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_small() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(m.matvec(&[1.0, -1.0]), vec![-1.0, -1.0, -1.0]);
    }

    #[test]
    fn transpose_matches_explicit() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let mut out = vec![0.0; 2];
        m.matvec_transpose_add(&[1.0, 10.0], &mut out);
        assert_eq!(out, vec![31.0, 42.0]);
    }

    #[test]
    fn outer_product_accumulates() {
        let mut grad = vec![0.0; 6];
        outer_add(&[1.0, 2.0], &[10.0, 20.0, 30.0], &mut grad);
        outer_add(&[1.0, 0.0], &[1.0, 1.0, 1.0], &mut grad);
        assert_eq!(grad, vec![11.0, 21.0, 31.0, 20.0, 40.0, 60.0]);
    }
}
