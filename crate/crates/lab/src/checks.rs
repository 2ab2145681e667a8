//! Deterministic numerical checks of the appendix identities, the
//! block-perturbation bound and the Helffer–Sjöstrand calculus.

use deformed_wigner::ensemble::{resolve_entry_law, sample_wigner, EntryLaw, LawKind, WignerSpec};
use deformed_wigner::funcalc::{
    block_perturbation_shift, check_block_perturbation, check_decoupling, check_resolvent_derivatives,
    check_resolvent_identity, hs_apply, hs_error_estimate, Bump, HSQuadrature, TestFunction,
};
use deformed_wigner::linalg::{ComplexMat, RealMat};
use deformed_wigner::spectral::spectral_apply;
use deformed_wigner::Result;
use num_complex::Complex64;
use rand::Rng;

/// Largest `|ε|` of the decoupling formula on Rademacher with `φ = x³`,
/// `p = 3` and Gaussian with `φ = x`, `p = 1`. Both are exact.
pub fn decoupling_defect() -> Result<f64> {
    let r = resolve_entry_law(&LawKind::rademacher(1.0), 1)?;
    let a = check_decoupling(&r, &[0.0, 0.0, 0.0, 1.0], 3)?;
    let b = check_decoupling(&EntryLaw::gaussian(1.0), &[0.0, 1.0], 1)?;
    Ok(a.epsilon.abs().max(b.epsilon.abs()))
}

fn random_z<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..1.0))
}

/// `‖R₂ − R₁ + R₁(X₁ − X₂)R₂‖_max`, relative to the entry scale, for two
/// independent real Wigner matrices.
pub fn identity_defect<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<f64> {
    let spec = WignerSpec::gaussian(n, 1, 1.0);
    let x1: RealMat = sample_wigner(&spec, rng)?;
    let x2: RealMat = sample_wigner(&spec, rng)?;
    let c = check_resolvent_identity(&x1, &x2, random_z(rng))?;
    Ok(c.deviation / c.scale)
}

/// Largest gap between the closed-form resolvent derivatives and finite
/// differences, over a real symmetric and a Hermitian matrix.
pub fn derivative_defect<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<f64> {
    let x: RealMat = sample_wigner(&WignerSpec::gaussian(n, 1, 1.0), rng)?;
    let h: ComplexMat = sample_wigner(&WignerSpec::gaussian(n, 2, 1.0), rng)?;
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let c = check_resolvent_derivatives(&x, random_z(rng), p, q)?;
        worst = worst.max(c.real);
        let c = check_resolvent_derivatives(&h, random_z(rng), p, q)?;
        worst = worst.max(c.real).max(c.imag.unwrap_or(0.0));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoByTwo {
    pub shift: f64,
    /// `|shift − (√(g² + 4ε²) − g)/2|` for diagonal gap `g`.
    pub closed_form_gap: f64,
    pub epsilon: f64,
}

/// `[[a, ε], [ε, a + 1]]` with a random offset `a`.
pub fn two_by_two<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<TwoByTwo> {
    let a: f64 = rng.gen_range(-1.0..1.0);
    let b = RealMat::from_rows(&[vec![a, epsilon], vec![epsilon, a + 1.0]]);
    let s = block_perturbation_shift(&b, 1)?;
    let exact = ((1.0 + 4.0 * epsilon * epsilon).sqrt() - 1.0) / 2.0;
    Ok(TwoByTwo {
        shift: s.shift,
        closed_form_gap: (s.shift - exact).abs(),
        epsilon,
    })
}

/// Largest `shift / (ε²/gap)` over random `3 + 3` blocks.
pub fn random_block_ratio<R: Rng + ?Sized>(epsilon: f64, draws: usize, rng: &mut R) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let b = check_block_perturbation((3, 3), 1.0, epsilon, rng)?;
        worst = worst.max(b.shift / b.bound);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsOutcome {
    /// `‖hs − spectral‖_F / ‖spectral‖_F` with the default quadrature.
    pub rel_error: f64,
    /// Largest relative gap between the default and the order/bump variants.
    pub variant_gap: f64,
    /// Largest grid-refinement estimate among the variants.
    pub quad_error: f64,
}

pub fn hs_test_function() -> TestFunction {
    TestFunction::smooth_bump(0.0, 3.2).weighted(&[1.0, 0.5, -0.2])
}

pub fn hs_check<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HsOutcome> {
    let x: RealMat = sample_wigner(&WignerSpec::gaussian(n, 1, 1.0), rng)?;
    let f = hs_test_function();
    let rel = |a: &RealMat, b: &RealMat| a.sub(b).frobenius_norm() / b.frobenius_norm();
    let exact = spectral_apply(&x, |t| f.eval(t))?;
    let base = HSQuadrature::default();
    let reference = hs_apply(&x, &f, &base)?;
    let variants = [
        HSQuadrature {
            order: 6,
            ..HSQuadrature::default()
        },
        HSQuadrature {
            bump: Bump::Warped,
            ..HSQuadrature::default()
        },
    ];
    let mut quad_error = hs_error_estimate(&x, &f, &base)?;
    let mut variant_gap = 0.0f64;
    for q in &variants {
        variant_gap = variant_gap.max(rel(&hs_apply(&x, &f, q)?, &reference));
        quad_error = quad_error.max(hs_error_estimate(&x, &f, q)?);
    }
    Ok(HsOutcome {
        rel_error: rel(&reference, &exact),
        variant_gap,
        quad_error,
    })
}
