//! Samplers for the predicted limit laws: the Case-A matrix `V_j`, GOE/GUE
//! blocks, and the Gaussian field `Υ(x)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{EntryLaw, RowProfile};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, Mat, RealMat, Scalar};
use crate::spectral::Semicircle;

fn gauss<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> f64 {
    variance.sqrt() * rng.sample::<f64, _>(StandardNormal)
}

fn check_beta(beta: u8) -> Result<()> {
    if beta == 1 || beta == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta must be 1 or 2, got {beta}")))
    }
}

/// Symmetric (Hermitian) Gaussian matrix with independent entries:
/// diagonal variances `diag[s]`, off-diagonal variance `off` (split evenly
/// between real and imaginary parts when `T` is complex).
fn gaussian_matrix<T: Scalar, R: Rng + ?Sized>(rng: &mut R, diag: &[f64], off: f64) -> Mat<T> {
    let k = diag.len();
    let mut m = Mat::<T>::zeros(k, k);
    for s in 0..k {
        m[(s, s)] = T::from_re(gauss(rng, diag[s]));
        for t in (s + 1)..k {
            m[(s, t)] = if T::BETA == 1 {
                T::from_re(gauss(rng, off))
            } else {
                let z = Complex64::new(gauss(rng, off / 2.0), gauss(rng, off / 2.0));
                T::from_c64(z).expect("complex field")
            };
        }
    }
    m.fill_lower_from_upper();
    m
}

/// `κ4(s) = m4(s) − (4 − β)σ⁴` for a row whose tail follows `profile`.
pub fn kappa4_row(profile: &RowProfile, beta: u8) -> Result<f64> {
    check_beta(beta)?;
    let first = profile
        .components
        .first()
        .ok_or_else(|| Error::InvalidLaw("empty row profile".into()))?;
    let s2 = first.1.variance;
    if profile
        .components
        .iter()
        .any(|(_, l)| (l.variance - s2).abs() > 1e-12 * s2.max(1e-300))
    {
        return Err(Error::InvalidLaw("row profile laws have different variances".into()));
    }
    Ok(profile.fourth_moment() - (4.0 - beta as f64) * s2 * s2)
}

/// Parameters of `V_j = U*(W + H)U`.
#[derive(Clone, Debug)]
pub struct CaseALimitSpec {
    pub theta: f64,
    pub sigma: f64,
    pub beta: u8,
    /// `K × k` coordinates of the spike's eigenvectors.
    pub u: RealMat,
    /// Row-major `K × K` laws of `W` (upper triangle used, diagonal real).
    pub block_laws: Vec<EntryLaw>,
    /// `κ4(s)` for each row of the block.
    pub kappa4: Vec<f64>,
}

impl CaseALimitSpec {
    /// i.i.d. entries: `offdiag` above the diagonal, `diag` on it.
    pub fn iid(theta: f64, sigma: f64, beta: u8, u: RealMat, offdiag: &EntryLaw, diag: &EntryLaw) -> Self {
        let k = u.rows();
        let block_laws = (0..k * k)
            .map(|p| if p / k == p % k { diag.clone() } else { offdiag.clone() })
            .collect();
        Self {
            theta,
            sigma,
            beta,
            u,
            block_laws,
            kappa4: vec![offdiag.fourth_cumulant; k],
        }
    }

    pub fn block_size(&self) -> usize {
        self.u.rows()
    }

    /// `(E H_ss², E|H_st|²)` for `s ≠ t`.
    pub fn h_variances(&self) -> Result<(Vec<f64>, f64)> {
        check_beta(self.beta)?;
        let sc = Semicircle::new(self.sigma)?;
        let scale = sc.fluctuation_scale(self.theta)?;
        let s4 = self.sigma.powi(4);
        let off = s4 / scale;
        let diag: Vec<f64> = self
            .kappa4
            .iter()
            .map(|k4| k4 / (self.theta * self.theta) + 2.0 / self.beta as f64 * off)
            .collect();
        if let Some(&bad) = diag.iter().find(|&&v| v < 0.0) {
            return Err(Error::NegativeVariance {
                entry: "H_ss",
                value: bad,
            });
        }
        Ok((diag, off))
    }

    /// Exact `Var V` when the spike is simple (`u` is a single column).
    pub fn rank_one_variance(&self) -> Result<f64> {
        self.validate()?;
        if self.u.cols() != 1 {
            return Err(Error::InvalidParameter(format!(
                "rank-one variance needs one column, got {}",
                self.u.cols()
            )));
        }
        let (hd, ho) = self.h_variances()?;
        let k = self.block_size();
        // Each real off-diagonal direction enters as 2 u_s u_t Re(W_st).
        let re_share = if self.beta == 1 { 1.0 } else { 0.5 };
        let mut v = 0.0;
        for s in 0..k {
            let us2 = self.u[(s, 0)].powi(2);
            v += us2 * us2 * (self.block_laws[s * k + s].variance + hd[s]);
            for t in (s + 1)..k {
                let ut2 = self.u[(t, 0)].powi(2);
                v += 4.0 * us2 * ut2 * re_share * (self.block_laws[s * k + t].variance + ho);
            }
        }
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        let k = self.block_size();
        if k == 0 || self.u.cols() == 0 {
            return Err(Error::InvalidParameter("empty coordinate block".into()));
        }
        if self.block_laws.len() != k * k || self.kappa4.len() != k {
            return Err(Error::DimensionMismatch {
                context: "Case-A limit spec",
                expected: k * k,
                found: self.block_laws.len(),
            });
        }
        Ok(())
    }
}

fn sample_vj_in<T: Scalar, R: Rng + ?Sized>(spec: &CaseALimitSpec, diag: &[f64], off: f64, rng: &mut R) -> Result<Vec<f64>> {
    let k = spec.block_size();
    let mut w = Mat::<T>::zeros(k, k);
    for s in 0..k {
        w[(s, s)] = T::from_re(spec.block_laws[s * k + s].draw_real(rng));
        for t in (s + 1)..k {
            w[(s, t)] = spec.block_laws[s * k + t].draw::<T, R>(rng);
        }
    }
    w.fill_lower_from_upper();
    let h = gaussian_matrix::<T, R>(rng, diag, off);
    let u: Mat<T> = spec.u.map(T::from_re);
    let v = u.adjoint().matmul(&w.add(&h)).matmul(&u);
    Ok(eig_sym(&v, false)?.eigenvalues)
}

/// Descending eigenvalues of one draw of `V_j`.
pub fn sample_vj<R: Rng + ?Sized>(spec: &CaseALimitSpec, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let (diag, off) = spec.h_variances()?;
    if spec.beta == 1 {
        sample_vj_in::<f64, R>(spec, &diag, off, rng)
    } else {
        sample_vj_in::<Complex64, R>(spec, &diag, off, rng)
    }
}

/// Entry variance `v = θ²σ²/(θ² − σ²)` of the Case-B block.
pub fn goe_block_variance(theta: f64, sigma: f64) -> Result<f64> {
    let scale = Semicircle::new(sigma)?.fluctuation_scale(theta)?;
    Ok(theta * theta * sigma * sigma / scale)
}

/// Descending eigenvalues of a `k × k` GOE (GUE) matrix with off-diagonal
/// variance `v` and diagonal variance `(2/β) v`.
pub fn sample_goe_block<R: Rng + ?Sized>(k: usize, theta: f64, sigma: f64, beta: u8, rng: &mut R) -> Result<Vec<f64>> {
    check_beta(beta)?;
    if k < 1 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    if !(theta > sigma) {
        return Err(Error::Subcritical { theta, sigma });
    }
    let v = goe_block_variance(theta, sigma)?;
    let diag = vec![2.0 / beta as f64 * v; k];
    if beta == 1 {
        Ok(eig_sym(&gaussian_matrix::<f64, R>(rng, &diag, v), false)?.eigenvalues)
    } else {
        Ok(eig_sym(&gaussian_matrix::<Complex64, R>(rng, &diag, v), false)?.eigenvalues)
    }
}

/// Parameters of `Υ(x) = g²(x)(W^{(K)} + Y(x))` at a real point.
#[derive(Clone, Debug)]
pub struct UpsilonSpec {
    pub x: f64,
    pub sigma: f64,
    pub kappa4: f64,
    pub k: usize,
    pub beta: u8,
    pub offdiag: EntryLaw,
    pub diag: EntryLaw,
}

impl UpsilonSpec {
    pub fn new(x: f64, k: usize, offdiag: EntryLaw, diag: EntryLaw) -> Self {
        Self {
            x,
            sigma: offdiag.variance.sqrt(),
            kappa4: offdiag.fourth_cumulant,
            k,
            beta: offdiag.beta(),
            offdiag,
            diag,
        }
    }

    /// `(V(Y_ii), E|Y_il|²)` for `i ≠ l`.
    pub fn y_variances(&self) -> Result<(f64, f64)> {
        check_beta(self.beta)?;
        let sc = Semicircle::new(self.sigma)?;
        let g = sc.stieltjes_real(self.x)?;
        let gp = sc.stieltjes_deriv_real(self.x)?;
        let s4 = self.sigma.powi(4);
        let diag = self.kappa4 * g * g - 2.0 / self.beta as f64 * s4 * gp;
        let off = -s4 * gp;
        if diag < 0.0 {
            return Err(Error::NegativeVariance {
                entry: "Y_ii",
                value: diag,
            });
        }
        Ok((diag, off))
    }
}

fn sample_upsilon_in<T: Scalar, R: Rng + ?Sized>(spec: &UpsilonSpec, g2: f64, dv: f64, ov: f64, rng: &mut R) -> Mat<T> {
    let k = spec.k;
    let mut w = Mat::<T>::zeros(k, k);
    for s in 0..k {
        w[(s, s)] = T::from_re(spec.diag.draw_real(rng));
        for t in (s + 1)..k {
            w[(s, t)] = spec.offdiag.draw::<T, R>(rng);
        }
    }
    w.fill_lower_from_upper();
    let y = gaussian_matrix::<T, R>(rng, &vec![dv; k], ov);
    w.add(&y).scaled(g2)
}

/// One draw of the `K × K` real (`β = 1`) matrix `Υ(x)`.
pub fn sample_upsilon<R: Rng + ?Sized>(spec: &UpsilonSpec, rng: &mut R) -> Result<RealMat> {
    if spec.beta != 1 {
        return Err(Error::InvalidParameter("use sample_upsilon_complex for beta = 2".into()));
    }
    let (dv, ov) = spec.y_variances()?;
    let g = Semicircle::new(spec.sigma)?.stieltjes_real(spec.x)?;
    Ok(sample_upsilon_in::<f64, R>(spec, g * g, dv, ov, rng))
}

/// One draw of `Υ(x)` in the Hermitian case.
pub fn sample_upsilon_complex<R: Rng + ?Sized>(spec: &UpsilonSpec, rng: &mut R) -> Result<Mat<Complex64>> {
    let (dv, ov) = spec.y_variances()?;
    let g = Semicircle::new(spec.sigma)?.stieltjes_real(spec.x)?;
    Ok(sample_upsilon_in::<Complex64, R>(spec, g * g, dv, ov, rng))
}
