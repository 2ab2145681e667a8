use num_complex::Complex64;

use super::mat::ComplexMat;
use crate::error::{Error, Result};

/// `(zI − T)⁻¹` for a real symmetric tridiagonal `T` and non-real `z`.
///
/// Elimination runs without pivoting: every pivot keeps an imaginary part
/// of the same sign as `Im z` and at least as large.
pub fn tridiagonal_inverse(diag: &[f64], offdiag: &[f64], z: Complex64) -> Result<ComplexMat> {
    let n = diag.len();
    if offdiag.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch {
            context: "tridiagonal off-diagonal",
            expected: n.saturating_sub(1),
            found: offdiag.len(),
        });
    }
    if z.im == 0.0 {
        return Err(Error::InvalidParameter(
            "tridiagonal resolvent needs a non-real spectral parameter".into(),
        ));
    }
    let mut pivots = Vec::with_capacity(n);
    let mut mult = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let a = z - diag[i];
        let u = if i == 0 {
            a
        } else {
            mult[i] = -offdiag[i - 1] / pivots[i - 1];
            a - offdiag[i - 1] * offdiag[i - 1] / pivots[i - 1]
        };
        pivots.push(u);
    }
    let mut inv = ComplexMat::zeros(n, n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        y[j] = Complex64::new(1.0, 0.0);
        for i in (j + 1)..n {
            y[i] = -mult[i] * y[i - 1];
        }
        let mut next = y[n - 1] / pivots[n - 1];
        inv[(n - 1, j)] = next;
        for i in (0..n - 1).rev() {
            next = (y[i] + offdiag[i] * next) / pivots[i];
            inv[(i, j)] = next;
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Lu, Mat};

    #[test]
    fn matches_dense_inverse() {
        let d = [0.3, -1.0, 2.0, 0.5];
        let e = [1.0, 0.25, 0.7];
        let z = Complex64::new(0.4, 0.05);
        let dense = Mat::from_fn(4, 4, |i, j| {
            if i == j {
                z - d[i]
            } else if i + 1 == j {
                Complex64::new(-e[i], 0.0)
            } else if j + 1 == i {
                Complex64::new(-e[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let expected = Lu::factor(dense).unwrap().inverse();
        let got = tridiagonal_inverse(&d, &e, z).unwrap();
        assert!(got.sub(&expected).max_abs() < 1e-12);
    }
}
