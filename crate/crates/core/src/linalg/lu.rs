//! LU factorization with partial pivoting.
//!
//! Used for resolvent solves at a fixed spectral parameter: one
//! factorization of `zI - X` serves every right-hand side.

use super::mat::Mat;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    sign: f64,
}

impl<T: Scalar> Lu<T> {
    /// Factors a square matrix. Fails on an exactly zero pivot.
    pub fn factor(mut a: Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                context: "LU factorization",
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in (k + 1)..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                let cols = a.cols();
                let data = a.as_mut_slice();
                for j in 0..cols {
                    data.swap(k * cols + j, p * cols + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            let inv = T::one() / pivot;
            let cols = a.cols();
            let data = a.as_mut_slice();
            let (head, tail) = data.split_at_mut((k + 1) * cols);
            let pivot_row = &head[k * cols + k + 1..(k + 1) * cols];
            for i in 0..(n - k - 1) {
                let row = &mut tail[i * cols..(i + 1) * cols];
                let l = row[k] * inv;
                row[k] = l;
                if l == T::zero() {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { lu: a, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "LU solve dimension mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    pub fn determinant(&self) -> T {
        let mut d = T::from_re(self.sign);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }

    pub fn inverse(&self) -> Mat<T> {
        let n = self.dim();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            inv.set_column(j, &col);
        }
        inv
    }
}

/// Determinant of a small square matrix.
pub fn determinant<T: Scalar>(a: &Mat<T>) -> Result<T> {
    match Lu::factor(a.clone()) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::SingularMatrix { .. }) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}
