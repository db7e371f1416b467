//! Dense square tensors of fixed rank over a chart of dimension `n`.

use std::ops::{Index, IndexMut};

use serde::Serialize;

/// Rank-`R` array with every axis of length `dim`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tensor<const R: usize> {
    dim: usize,
    data: Vec<f64>,
}

impl<const R: usize> Tensor<R> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(R as u32)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for flat in 0..t.data.len() {
            t.data[flat] = f(t.unflatten(flat));
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn flatten(&self, idx: [usize; R]) -> usize {
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    fn unflatten(&self, mut flat: usize) -> [usize; R] {
        let mut idx = [0; R];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// Every multi-index in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = [usize; R]> + '_ {
        (0..self.data.len()).map(move |f| self.unflatten(f))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<const R: usize> Index<[usize; R]> for Tensor<R> {
    type Output = f64;
    #[inline]
    fn index(&self, idx: [usize; R]) -> &f64 {
        &self.data[self.flatten(idx)]
    }
}

impl<const R: usize> IndexMut<[usize; R]> for Tensor<R> {
    #[inline]
    fn index_mut(&mut self, idx: [usize; R]) -> &mut f64 {
        let f = self.flatten(idx);
        &mut self.data[f]
    }
}

pub type Vector = Tensor<1>;
pub type Matrix = Tensor<2>;

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |[i, j]| if i == j { 1.0 } else { 0.0 })
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self[[i, j]])
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |[i, j]| m[(i, j)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |[i, j]| {
            (0..n).map(|k| self[[i, k]] * other[[k, j]]).sum()
        })
    }

    /// `a^T M b` for chart vectors.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * self[[i, j]] * b[j];
            }
        }
        s
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self[[i, j]] * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[[i, i]]).sum()
    }

    /// `max |M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                m = m.max((self[[i, j]] - self[[j, i]]).abs());
            }
        }
        m
    }
}
