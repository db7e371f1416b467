//! Central-difference jets for black-box evaluators.
//!
//! Orders 1 and 2 use step [`FD_STEP_LOW`], order 3 uses [`FD_STEP_THIRD`]; every
//! order is Richardson-extrapolated between `h` and `2h`, leaving an `O(h⁴)`
//! truncation error.

use super::ComponentJet;
use crate::tensor::{Matrix, Tensor};

pub const FD_STEP_LOW: f64 = 1e-3;
pub const FD_STEP_THIRD: f64 = 1e-2;

/// Apply nested central differences along `dirs` with step `h`.
fn nested_central(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], dirs: &[usize], h: f64) -> Vec<f64> {
    let order = dirs.len();
    let mut acc: Option<Vec<f64>> = None;
    for mask in 0..(1usize << order) {
        let mut x = p.to_vec();
        let mut sign = 1.0;
        for (b, &d) in dirs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                x[d] -= h;
                sign = -sign;
            } else {
                x[d] += h;
            }
        }
        let y = f(&x);
        let a = acc.get_or_insert_with(|| vec![0.0; y.len()]);
        for (s, v) in a.iter_mut().zip(&y) {
            *s += sign * v;
        }
    }
    let denom = (2.0 * h).powi(order as i32);
    acc.unwrap_or_default()
        .into_iter()
        .map(|v| v / denom)
        .collect()
}

fn richardson(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], dirs: &[usize], h: f64) -> Vec<f64> {
    let fine = nested_central(f, p, dirs, h);
    let coarse = nested_central(f, p, dirs, 2.0 * h);
    fine.iter()
        .zip(&coarse)
        .map(|(a, b)| (4.0 * a - b) / 3.0)
        .collect()
}

pub(crate) fn fd_component_jets(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
    order: usize,
) -> Vec<ComponentJet> {
    let n = p.len();
    let values = f(p);
    let mut jets: Vec<ComponentJet> = values
        .iter()
        .map(|&v| ComponentJet {
            value: v,
            grad: vec![0.0; n],
            hess: Matrix::zeros(n),
            third: Tensor::zeros(n),
        })
        .collect();
    if order >= 1 {
        for i in 0..n {
            for (c, v) in richardson(f, p, &[i], FD_STEP_LOW).into_iter().enumerate() {
                jets[c].grad[i] = v;
            }
        }
    }
    if order >= 2 {
        for i in 0..n {
            for j in i..n {
                for (c, v) in richardson(f, p, &[i, j], FD_STEP_LOW)
                    .into_iter()
                    .enumerate()
                {
                    jets[c].hess[[i, j]] = v;
                    jets[c].hess[[j, i]] = v;
                }
            }
        }
    }
    if order >= 3 {
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let d = richardson(f, p, &[i, j, k], FD_STEP_THIRD);
                    for (c, v) in d.into_iter().enumerate() {
                        for [a, b, e] in permutations3(i, j, k) {
                            jets[c].third[[a, b, e]] = v;
                        }
                    }
                }
            }
        }
    }
    jets
}

pub(crate) fn permutations3(i: usize, j: usize, k: usize) -> [[usize; 3]; 6] {
    [
        [i, j, k],
        [i, k, j],
        [j, i, k],
        [j, k, i],
        [k, i, j],
        [k, j, i],
    ]
}
