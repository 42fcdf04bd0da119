//! Dense symmetric eigendecomposition for the optimizer's covariance matrix.
//!
//! Matrices are square, row-major `Vec`s.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi
/// rotations. Eigenvector `k` is column `k` of the returned row-major matrix.
pub fn symmetric_eigen<T: Scalar>(matrix: &[T], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if matrix.len() != n * n {
        return Err(Error::InvalidDimension(format!(
            "matrix has {} entries, expected {n}x{n}",
            matrix.len()
        )));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut a = matrix.to_vec();
    let mut v = identity::<T>(n);
    let total: T = a.iter().map(|&x| x * x).sum();
    let tol = T::epsilon() * T::epsilon() * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tol || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let two = T::one() + T::one();
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|k| a[k * n + k]).collect();
    Ok((values, v))
}

pub fn identity<T: Scalar>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for k in 0..n {
        m[k * n + k] = T::one();
    }
    m
}

/// `matrix * vector` for a square row-major matrix.
pub fn mat_vec<T: Scalar>(matrix: &[T], vector: &[T]) -> Vec<T> {
    let n = vector.len();
    (0..n)
        .map(|r| {
            matrix[r * n..(r + 1) * n]
                .iter()
                .zip(vector)
                .map(|(&a, &b)| a * b)
                .sum()
        })
        .collect()
}

pub fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}
