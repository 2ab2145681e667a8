use crate::ensemble::Deformation;
use crate::error::{Error, Result};
use crate::linalg::{determinant, eig_sym, Mat, Scalar};
use crate::spectral::{Resolvent, Semicircle, SpectralData};

use super::predict::{predict_outliers, Side};

/// `Ξ = √N (U* R(x) U − c I)` for one block of columns.
#[derive(Clone, Debug)]
pub struct XiBlock<T> {
    pub matrix: Mat<T>,
    pub x: f64,
    pub n: usize,
    /// `max |Ξ − Ξ*|` before symmetrization.
    pub asymmetry: f64,
}

impl<T: Scalar> XiBlock<T> {
    /// Descending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_sym(&self.matrix, false)?.eigenvalues)
    }
}

/// Asymmetry above this means the solves were inaccurate.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

fn centered_block<T: Scalar>(r: &Resolvent<T>, block: &[Vec<T>], center: f64, n: usize) -> Result<XiBlock<T>> {
    let k = block.len();
    let root = (n as f64).sqrt();
    let mut m = r.compress(block);
    for i in 0..k {
        m[(i, i)] -= T::from_re(center);
    }
    let m = m.scaled(root);
    let asymmetry = m.sub(&m.adjoint()).max_abs();
    if asymmetry > SYMMETRY_TOLERANCE * (1.0 + m.max_abs()) {
        return Err(Error::NotSelfAdjoint(asymmetry));
    }
    let matrix = m.add(&m.adjoint()).scaled(0.5);
    Ok(XiBlock {
        matrix,
        x: r.z().re,
        n,
        asymmetry,
    })
}

/// `Ξ^{(j)}` with entries `√N(⟨v_i, R(x) v_l⟩ − δ_il/θ)`.
pub fn xi_matrix<T: Scalar>(x: &Mat<T>, block: &[Vec<T>], point: f64, theta: f64) -> Result<XiBlock<T>> {
    if theta == 0.0 {
        return Err(Error::InvalidParameter("θ must be nonzero".into()));
    }
    let r = Resolvent::real(x, point)?;
    centered_block(&r, block, 1.0 / theta, x.rows())
}

/// `Ξ_N(x)` over all `r` columns, centered at `g_σ(x)`.
pub fn xi_full<T: Scalar>(x: &Mat<T>, deformation: &Deformation, point: f64, sigma: f64) -> Result<XiBlock<T>> {
    let g = Semicircle::new(sigma)?.stieltjes_real(point)?;
    let cols: Vec<Vec<T>> = (0..deformation.rank()).map(|c| deformation.column(c)).collect();
    let r = Resolvent::real(x, point)?;
    centered_block(&r, &cols, g, x.rows())
}

/// `Z_N(x) = Θ⁻¹ − Ξ_N(x)/√N`.
pub fn z_matrix<T: Scalar>(deformation: &Deformation, xi: &XiBlock<T>) -> Result<Mat<T>> {
    let thetas = deformation.column_thetas();
    if thetas.len() != xi.matrix.rows() {
        return Err(Error::DimensionMismatch {
            context: "Z matrix",
            expected: thetas.len(),
            found: xi.matrix.rows(),
        });
    }
    if thetas.iter().any(|&t| t == 0.0) {
        return Err(Error::SingularMatrix { pivot: 0 });
    }
    let inv: Vec<f64> = thetas.iter().map(|t| 1.0 / t).collect();
    Ok(Mat::diag(&inv).sub(&xi.matrix.scaled(1.0 / (xi.n as f64).sqrt())))
}

/// `det(I_r − Θ U* R(x) U)` together with the scale
/// `Π_i (1 + |θ_i| ‖row_i(U* R U)‖)`, which bounds `|det|` by Hadamard's
/// inequality and does not vanish with it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MasterDet<T> {
    pub value: T,
    pub scale: f64,
}

impl<T: Scalar> MasterDet<T> {
    /// `|det| / scale ∈ [0, 1]`.
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

pub fn master_det<T: Scalar>(x: &Mat<T>, deformation: &Deformation, point: f64) -> Result<MasterDet<T>> {
    master_det_with_tolerance(x, deformation, point, crate::spectral::DEFAULT_SPECTRUM_TOLERANCE)
}

pub fn master_det_with_tolerance<T: Scalar>(
    x: &Mat<T>,
    deformation: &Deformation,
    point: f64,
    rel_tol: f64,
) -> Result<MasterDet<T>> {
    let r = Resolvent::real_with_tolerance(x, point, rel_tol)?;
    let cols: Vec<Vec<T>> = (0..deformation.rank()).map(|c| deformation.column(c)).collect();
    let c = r.compress(&cols);
    let thetas = deformation.column_thetas();
    let b = Mat::from_fn(cols.len(), cols.len(), |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        id - c[(i, j)].scale(thetas[i])
    });
    let scale = (0..c.rows())
        .map(|i| 1.0 + thetas[i].abs() * c.row(i).iter().map(|v| v.abs2()).sum::<f64>().sqrt())
        .product();
    Ok(MasterDet {
        value: determinant(&b)?,
        scale,
    })
}

/// `√N(λ_{k_1+…+i} − ρ_j) + y_i/g′(ρ_j)` for each eigenvalue of spike `j`,
/// where `y_1 ≥ … ≥ y_{k_j}` are the eigenvalues of `Ξ^{(j)}`.
pub fn prop1_residuals<T: Scalar>(
    spectrum: &SpectralData<T>,
    x: &Mat<T>,
    deformation: &Deformation,
    j: usize,
    sigma: f64,
) -> Result<Vec<f64>> {
    let spike = deformation
        .spikes
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(format!("no spike {j}")))?;
    if !(spike.theta > sigma) {
        return Err(Error::Subcritical {
            theta: spike.theta,
            sigma,
        });
    }
    let pred = predict_outliers(&deformation.spikes, sigma, spectrum.eigenvalues.len())?;
    let group = pred.group_for_spike(j).expect("supercritical spike has a group");
    debug_assert_eq!(group.side, Side::Upper);
    let xi = xi_matrix(x, &deformation.spike_block::<T>(j), group.rho, spike.theta)?;
    let y = xi.eigenvalues()?;
    let root = (x.rows() as f64).sqrt();
    let gp = Semicircle::new(sigma)?.stieltjes_deriv_real(group.rho)?;
    Ok(group
        .indices
        .clone()
        .zip(&y)
        .map(|(idx, yi)| root * (spectrum.eigenvalues[idx] - group.rho) + yi / gp)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{build_deformation, DeformationMode, Spike};
    use crate::linalg::RealMat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn localized(spikes: &[Spike], n: usize) -> Deformation {
        let mode = DeformationMode::CanonicalLocalized { block: None };
        build_deformation(spikes, &mode, n, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
    }

    #[test]
    fn xi_of_zero_matrix() {
        let x = RealMat::zeros(4, 4);
        let d = localized(&[Spike::new(2.0, 1)], 4);
        let xi = xi_matrix(&x, &d.spike_block::<f64>(0), 2.5, 2.0).unwrap();
        assert!((xi.matrix[(0, 0)] + 0.2).abs() < 1e-15);
        let d2 = localized(&[Spike::new(2.0, 2)], 4);
        let xi2 = xi_matrix(&x, &d2.spike_block::<f64>(0), 2.5, 2.0).unwrap();
        assert_eq!(xi2.matrix[(0, 1)], 0.0);
    }

    #[test]
    fn master_det_of_zero_matrix() {
        // f(x) = 1 − 2/x.
        let x = RealMat::zeros(2, 2);
        let d = localized(&[Spike::new(2.0, 1)], 2);
        assert!(master_det(&x, &d, 2.0).unwrap().value.abs() < 1e-15);
        assert!((master_det(&x, &d, 1.0).unwrap().value + 1.0).abs() < 1e-15);
        assert!((master_det(&x, &d, 1e6).unwrap().value - 1.0).abs() < 1e-5);
    }

    #[test]
    fn z_matrix_criterion_on_zero_matrix() {
        let x = RealMat::zeros(2, 2);
        let d = localized(&[Spike::new(2.0, 1)], 2);
        // Ξ = 0 gives Θ⁻¹.
        let zero = XiBlock {
            matrix: RealMat::zeros(1, 1),
            x: 3.0,
            n: 2,
            asymmetry: 0.0,
        };
        assert_eq!(z_matrix(&d, &zero).unwrap()[(0, 0)], 0.5);
        // At x = 2.5 with σ = 1, Z = 1/θ − (1/x − g(x)) = 0.6 ≠ g(x) = 0.5:
        // 2.5 is not an eigenvalue of diag(2, 0).
        let xi = xi_full(&x, &d, 2.5, 1.0).unwrap();
        let z = z_matrix(&d, &xi).unwrap();
        assert!((z[(0, 0)] - 0.6).abs() < 1e-15);
        // With σ = 0.5 the point x = 2 is off the support, and Z(2) = g(2).
        let sc = Semicircle::new(0.5).unwrap();
        let xi = xi_full(&x, &d, 2.0, 0.5).unwrap();
        let z = z_matrix(&d, &xi).unwrap();
        assert!((z[(0, 0)] - sc.stieltjes_real(2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn prop1_residual_closed_form() {
        // X = 0: λ1 = θ exactly, and the residual collapses to
        // −2√N σ⁴ / (θ(θ² + σ²)).
        let n = 4;
        let (theta, sigma) = (2.0, 1.0);
        let x = RealMat::zeros(n, n);
        let d = localized(&[Spike::new(theta, 1)], n);
        let m = d.matrix::<f64>();
        let sd = eig_sym(&m, false).unwrap();
        let res = prop1_residuals(&sd, &x, &d, 0, sigma).unwrap();
        let expected = -2.0 * (n as f64).sqrt() * sigma.powi(4) / (theta * (theta * theta + sigma * sigma));
        assert!((res[0] - expected).abs() < 1e-14, "{} vs {expected}", res[0]);
        assert!((expected + 0.4).abs() < 1e-15);
    }

    #[test]
    fn prop1_rejects_subcritical() {
        let x = RealMat::zeros(3, 3);
        let d = localized(&[Spike::new(0.5, 1)], 3);
        let sd = eig_sym(&d.matrix::<f64>(), false).unwrap();
        assert!(matches!(prop1_residuals(&sd, &x, &d, 0, 1.0), Err(Error::Subcritical { .. })));
    }
}
