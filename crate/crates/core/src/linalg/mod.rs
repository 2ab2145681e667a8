//! Dense linear algebra over real and complex scalars.

mod eigen;
mod lu;
mod mat;
mod scalar;
mod tridiag;

pub use eigen::{eig_projected, eig_sym, ProjectedSpectrum, SpectralData, Tridiagonal, MAX_QL_ITERATIONS};
pub use lu::{determinant, Lu};
pub use mat::{ComplexMat, Mat, RealMat};
pub use scalar::{dot, lift, norm, Scalar};
pub use tridiag::tridiagonal_inverse;

use crate::error::{Error, Result};

/// Modified Gram–Schmidt with one re-orthogonalization pass. Fails when a
/// column is (numerically) in the span of the previous ones.
pub fn orthonormalize_columns<T: Scalar>(a: &Mat<T>) -> Result<Mat<T>> {
    let (n, r) = (a.rows(), a.cols());
    let mut q = a.clone();
    for j in 0..r {
        let mut col = q.column(j);
        let original = norm(&col);
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let proj = dot(&qi, &col);
                for (c, &b) in col.iter_mut().zip(&qi) {
                    *c -= b * proj;
                }
            }
        }
        let nrm = norm(&col);
        if original == 0.0 || nrm <= 1e-10 * original || !nrm.is_finite() {
            return Err(Error::InvalidDeformation(format!(
                "column {j} is linearly dependent on the previous columns"
            )));
        }
        for c in col.iter_mut() {
            *c = c.scale(1.0 / nrm);
        }
        q.set_column(j, &col);
    }
    debug_assert_eq!(q.rows(), n);
    Ok(q)
}
