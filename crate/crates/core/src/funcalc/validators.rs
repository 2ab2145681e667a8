use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensemble::EntryLaw;
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, orthonormalize_columns, ComplexMat, Lu, Mat, RealMat, Scalar};
use crate::spectral::Resolvent;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingCheck {
    /// `E ξφ(ξ)`.
    pub lhs: f64,
    /// `Σ_{a ≤ p} κ_{a+1}/a! E φ^(a)(ξ)`.
    pub rhs: f64,
    pub epsilon: f64,
    /// `C_p sup|φ^(p+1)| E|ξ|^{p+2}`; infinite when `φ^(p+1)` is unbounded.
    pub bound: f64,
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect()
}

fn poly_expectation(c: &[f64], law: &EntryLaw, shift: u32) -> f64 {
    c.iter()
        .enumerate()
        .map(|(k, v)| v * law.raw_moment(k as u32 + shift))
        .sum()
}

fn degree(c: &[f64]) -> Option<usize> {
    c.iter().rposition(|&v| v != 0.0)
}

/// `Σ_b (b − 1)! S(n, b)`, which bounds `|κ_n| / E|ξ|^n`.
pub fn cumulant_moment_constant(n: usize) -> f64 {
    let mut s = vec![vec![0.0f64; n + 1]; n + 1];
    s[0][0] = 1.0;
    for i in 1..=n {
        for b in 1..=i {
            s[i][b] = b as f64 * s[i - 1][b] + s[i - 1][b - 1];
        }
    }
    let mut fact = 1.0;
    let mut total = 0.0;
    for b in 1..=n {
        if b > 1 {
            fact *= (b - 1) as f64;
        }
        total += fact * s[n][b];
    }
    total
}

/// Constant `C_p` of the remainder bound: `cumulant_moment_constant(p + 2)/(p + 1)!`.
pub fn decoupling_constant(p: usize) -> f64 {
    let fact: f64 = (1..=p + 1).map(|k| k as f64).product();
    cumulant_moment_constant(p + 2) / fact
}

/// Cumulant expansion of `E ξφ(ξ)` truncated after `p` terms, for a
/// polynomial `φ` with ascending coefficients `phi`.
pub fn check_decoupling(law: &EntryLaw, phi: &[f64], p: usize) -> Result<DecouplingCheck> {
    if law.beta() != 1 {
        return Err(Error::InvalidLaw("decoupling needs a real entry law".into()));
    }
    const MAX_ORDER: usize = 40;
    if p + 2 > MAX_ORDER || phi.len() + 1 > MAX_ORDER {
        return Err(Error::InsufficientMoments {
            needed: (p + 2).max(phi.len() + 1),
            available: MAX_ORDER,
        });
    }
    let lhs = poly_expectation(phi, law, 1);
    let kappa = law.cumulants(p as u32 + 1);
    let mut rhs = 0.0;
    let mut d = phi.to_vec();
    let mut fact = 1.0;
    for a in 0..=p {
        if a > 0 {
            d = poly_deriv(&d);
            fact *= a as f64;
        }
        rhs += kappa[a + 1] / fact * poly_expectation(&d, law, 0);
    }
    let bound = match degree(phi) {
        Some(deg) if deg > p + 1 => f64::INFINITY,
        Some(deg) if deg == p + 1 => {
            let sup = phi[deg].abs() * (1..=deg).map(|k| k as f64).product::<f64>();
            decoupling_constant(p) * sup * law.abs_moment((p + 2) as f64)
        }
        _ => 0.0,
    };
    Ok(DecouplingCheck {
        lhs,
        rhs,
        epsilon: lhs - rhs,
        bound,
    })
}

fn resolvent_matrix<T: Scalar>(x: &Mat<T>, z: Complex64) -> Result<ComplexMat> {
    let n = x.rows();
    let a = Mat::from_fn(n, n, |i, j| {
        let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
        d - x[(i, j)].to_c64()
    });
    Ok(Lu::factor(a)?.inverse())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// `max |R₂ − R₁ + R₁(X₁ − X₂)R₂|`.
    pub deviation: f64,
    /// `1 + max|R₁| + max|R₂|`.
    pub scale: f64,
}

pub fn check_resolvent_identity<T: Scalar>(x1: &Mat<T>, x2: &Mat<T>, z: Complex64) -> Result<IdentityCheck> {
    if x1.rows() != x2.rows() || !x1.is_square() || !x2.is_square() {
        return Err(Error::DimensionMismatch {
            context: "resolvent identity",
            expected: x1.rows(),
            found: x2.rows(),
        });
    }
    let r1 = resolvent_matrix(x1, z)?;
    let r2 = resolvent_matrix(x2, z)?;
    let diff = x1.sub(x2).to_complex();
    let dev = r2.sub(&r1).add(&r1.matmul(&diff).matmul(&r2)).max_abs();
    Ok(IdentityCheck {
        deviation: dev,
        scale: 1.0 + r1.max_abs() + r2.max_abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    /// Worst entry gap for the real (or diagonal) direction.
    pub real: f64,
    /// Worst entry gap for the imaginary direction (Hermitian, `p ≠ q`).
    pub imag: Option<f64>,
    pub step: f64,
    /// `max |R_kl|`, never above `1/dist(z, Sp X)`.
    pub max_entry: f64,
}

/// Compares `∂R_kl/∂X_pq` from central differences with the closed forms
/// `R_kp R_ql + R_kq R_pl` (`p ≠ q`), `R_kp R_pl` (`p = q`) and
/// `i(R_kp R_ql − R_kq R_pl)` for the imaginary part of a Hermitian entry.
pub fn check_resolvent_derivatives<T: Scalar>(x: &Mat<T>, z: Complex64, p: usize, q: usize) -> Result<DerivativeCheck> {
    let n = x.rows();
    if p >= n || q >= n {
        return Err(Error::InvalidParameter(format!("entry ({p}, {q}) outside a {n}×{n} matrix")));
    }
    let dist = Resolvent::complex(x, z)?.distance();
    let scale = 1.0 + x.inf_norm();
    let step = (1e-5 * scale).min(1e-3 * dist);
    if step < 1e-12 * scale {
        return Err(Error::StepUnderflow(step));
    }
    let r = resolvent_matrix(x, z)?;
    let xc = x.to_complex();
    let one = Complex64::new(1.0, 0.0);
    let direction = |e: Complex64, formula: &dyn Fn(usize, usize) -> Complex64| -> Result<f64> {
        let mut d = ComplexMat::zeros(n, n);
        d[(p, q)] += e;
        if p != q {
            d[(q, p)] += e.conj();
        }
        let rp = resolvent_matrix(&xc.add(&d.scaled(step)), z)?;
        let rm = resolvent_matrix(&xc.sub(&d.scaled(step)), z)?;
        let fd = rp.sub(&rm).scaled(0.5 / step);
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                worst = worst.max((fd[(k, l)] - formula(k, l)).norm());
            }
        }
        Ok(worst)
    };
    let real = if p == q {
        direction(one, &|k, l| r[(k, p)] * r[(p, l)])?
    } else {
        direction(one, &|k, l| r[(k, p)] * r[(q, l)] + r[(k, q)] * r[(p, l)])?
    };
    let imag = if T::BETA == 2 && p != q {
        let i = Complex64::new(0.0, 1.0);
        Some(direction(i, &|k, l| i * (r[(k, p)] * r[(q, l)] - r[(k, q)] * r[(p, l)]))?)
    } else {
        None
    };
    Ok(DerivativeCheck {
        real,
        imag,
        step,
        max_entry: r.max_abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPerturbation {
    /// `max_i |λ_i(B) − λ_i(B₁₁)|` over the `n₁` smallest eigenvalues.
    pub shift: f64,
    /// `‖B₁₂‖`.
    pub epsilon: f64,
    /// `min Sp(B₂₂) − max Sp(B₁₁)`.
    pub gap: f64,
    /// `shift / ε²`.
    pub constant: f64,
    /// `ε²/gap`.
    pub bound: f64,
}

fn ascending<T: Scalar>(m: &Mat<T>) -> Result<Vec<f64>> {
    let mut e = eig_sym(m, false)?.eigenvalues;
    e.reverse();
    Ok(e)
}

/// Eigenvalue shift of the upper-left block of `b` caused by the coupling.
pub fn block_perturbation_shift<T: Scalar>(b: &Mat<T>, n1: usize) -> Result<BlockPerturbation> {
    let n = b.rows();
    if n1 == 0 || n1 >= n {
        return Err(Error::InvalidParameter(format!("block split {n1} of {n}")));
    }
    let b11 = b.block(0, 0, n1, n1);
    let b22 = b.block(n1, n1, n - n1, n - n1);
    let b12 = b.block(0, n1, n1, n - n1);
    let e11 = ascending(&b11)?;
    let e22 = ascending(&b22)?;
    let gap = e22[0] - e11[n1 - 1];
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("block spectra overlap: gap {gap}")));
    }
    let epsilon = eig_sym(&b12.matmul(&b12.adjoint()), false)?.largest().max(0.0).sqrt();
    let all = ascending(b)?;
    let shift = all.iter().zip(&e11).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BlockPerturbation {
        shift,
        epsilon,
        gap,
        constant: if epsilon > 0.0 { shift / (epsilon * epsilon) } else { 0.0 },
        bound: epsilon * epsilon / gap,
    })
}

fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RealMat> {
    orthonormalize_columns(&RealMat::from_fn(n, n, |_, _| rng.sample(StandardNormal)))
}

/// Random symmetric `B` with `Sp(B₁₁) ⊂ [−1, 0]`, `Sp(B₂₂) ⊂ [gap, gap + 1]`
/// and `‖B₁₂‖ = epsilon`.
pub fn check_block_perturbation<R: Rng + ?Sized>(
    block_sizes: (usize, usize),
    gap: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<BlockPerturbation> {
    let (n1, n2) = block_sizes;
    if n1 == 0 || n2 == 0 || !(gap > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "blocks {block_sizes:?}, gap {gap}, ε {epsilon}"
        )));
    }
    let spectrum = |lo: f64, k: usize, rng: &mut R| -> Vec<f64> { (0..k).map(|_| lo + rng.gen::<f64>()).collect() };
    let d1 = spectrum(-1.0, n1, rng);
    let d2 = spectrum(gap, n2, rng);
    let q1 = random_orthogonal(n1, rng)?;
    let q2 = random_orthogonal(n2, rng)?;
    let b11 = q1.matmul(&RealMat::diag(&d1)).matmul(&q1.adjoint());
    let b22 = q2.matmul(&RealMat::diag(&d2)).matmul(&q2.adjoint());
    let g = RealMat::from_fn(n1, n2, |_, _| rng.sample(StandardNormal));
    let gn = eig_sym(&g.matmul(&g.adjoint()), false)?.largest().sqrt();
    let b12 = g.scaled(epsilon / gn);
    let n = n1 + n2;
    let b = RealMat::from_fn(n, n, |i, j| match (i < n1, j < n1) {
        (true, true) => b11[(i, j)],
        (false, false) => b22[(i - n1, j - n1)],
        (true, false) => b12[(i, j - n1)],
        (false, true) => b12[(j, i - n1)],
    });
    block_perturbation_shift(&b, n1)
}
