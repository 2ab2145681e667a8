use deformed_wigner::ensemble::{resolve_entry_law, sample_wigner, EntryLaw, LawKind, WignerSpec};
use deformed_wigner::funcalc::*;
use deformed_wigner::linalg::{ComplexMat, Lu, Mat, RealMat};
use deformed_wigner::rng::{stream, Purpose};
use deformed_wigner::spectral::spectral_apply;
use num_complex::Complex64;
use proptest::prelude::*;

fn wigner(n: usize, seed: u64) -> RealMat {
    sample_wigner(&WignerSpec::gaussian(n, 1, 1.0), &mut stream(seed, 0, Purpose::Matrix)).unwrap()
}

fn hermitian(n: usize, seed: u64) -> ComplexMat {
    sample_wigner(&WignerSpec::gaussian(n, 2, 1.0), &mut stream(seed, 0, Purpose::Matrix)).unwrap()
}

fn rel<T: deformed_wigner::linalg::Scalar>(a: &Mat<T>, b: &Mat<T>) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm()
}

fn test_fn() -> TestFunction {
    TestFunction::smooth_bump(0.0, 3.2).weighted(&[1.0, 0.5, -0.2])
}

#[test]
fn hs_matches_spectral_calculus() {
    let x = wigner(50, 1);
    let f = test_fn();
    let hs = hs_apply(&x, &f, &HSQuadrature::default()).unwrap();
    let exact = spectral_apply(&x, |t| f.eval(t)).unwrap();
    let err = rel(&hs, &exact);
    assert!(err <= 1e-3, "relative error {err}");
    assert!(hs.self_adjoint_defect() == 0.0);
}

#[test]
fn hs_hermitian() {
    let x = hermitian(30, 2);
    let f = TestFunction::plateau(0.0, 3.2, 0.3).weighted(&[0.0, 1.0]);
    let hs = hs_apply(&x, &f, &HSQuadrature::default()).unwrap();
    let exact = spectral_apply(&x, |t| f.eval(t)).unwrap();
    assert!(rel(&hs, &exact) <= 1e-3);
}

#[test]
fn halving_steps_reduces_the_error() {
    let x = wigner(20, 3);
    let f = test_fn();
    let exact = spectral_apply(&x, |t| f.eval(t)).unwrap();
    let coarse = HSQuadrature {
        x_step: 0.2,
        y_min: 0.02,
        y_geometric: 6,
        y_uniform: 6,
        ..HSQuadrature::default()
    };
    let e1 = rel(&hs_apply(&x, &f, &coarse).unwrap(), &exact);
    let e2 = rel(&hs_apply(&x, &f, &coarse.refined()).unwrap(), &exact);
    assert!(e1 >= 2.0 * e2, "{e1} then {e2}");
}

#[test]
fn independent_of_order_and_bump() {
    let x = wigner(30, 4);
    let f = test_fn();
    let variants = [
        HSQuadrature::default(),
        HSQuadrature {
            order: 6,
            ..HSQuadrature::default()
        },
        HSQuadrature {
            bump: Bump::Warped,
            ..HSQuadrature::default()
        },
    ];
    let results: Vec<RealMat> = variants.iter().map(|q| hs_apply(&x, &f, q).unwrap()).collect();
    let errs: Vec<f64> = variants.iter().map(|q| hs_error_estimate(&x, &f, q).unwrap()).collect();
    let quad_err = errs.iter().cloned().fold(0.0, f64::max);
    for r in &results[1..] {
        let d = rel(r, &results[0]);
        assert!(d <= 2.0 * quad_err, "variant gap {d}, quadrature error {quad_err}");
    }
}

#[test]
fn dbar_bound_constant() {
    for q in [
        HSQuadrature::default(),
        HSQuadrature {
            bump: Bump::Warped,
            ..HSQuadrature::default()
        },
    ] {
        let c = q.dbar_constant(&test_fn());
        let sup_bump = (0..1000).map(|k| q.bump.deriv(0.5 + k as f64 / 2000.0).abs()).fold(0.0, f64::max);
        // On y ≤ 1/2 only the top term survives; on [1/2, 1] y^(−l) ≤ 2^l.
        let ceiling = 2f64.powi(q.order as i32 - 1) * (std::f64::consts::E * sup_bump + 1.0 / 24.0);
        assert!(c.is_finite() && c > 0.0 && c <= ceiling, "{c} vs {ceiling}");
    }
}

#[test]
fn decoupling_for_the_example_laws() {
    let r = resolve_entry_law(&LawKind::rademacher(1.0), 1).unwrap();
    let c = check_decoupling(&r, &[0.0, 0.0, 0.0, 1.0], 3).unwrap();
    assert!(c.epsilon.abs() <= 1e-12);
    let c = check_decoupling(&EntryLaw::gaussian(1.0), &[0.0, 1.0], 1).unwrap();
    assert!(c.epsilon.abs() <= 1e-12);
    assert!(check_decoupling(&resolve_entry_law(&LawKind::gaussian(1.0), 2).unwrap(), &[1.0], 0).is_err());
}

proptest! {
    #[test]
    fn decoupling_exact_for_low_degree(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..5),
        extra in 0usize..3,
        which in 0usize..3,
    ) {
        let law = match which {
            0 => EntryLaw::gaussian(1.5),
            1 => resolve_entry_law(&LawKind::uniform(1.0), 1).unwrap(),
            _ => resolve_entry_law(&LawKind::TwoPoint { a: 2.0, p: 0.2 }, 1).unwrap(),
        };
        let p = coeffs.len() - 1 + extra;
        let c = check_decoupling(&law, &coeffs, p).unwrap();
        let scale = 1.0 + c.lhs.abs();
        prop_assert!(c.epsilon.abs() <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn remainder_within_bound(k in 1usize..6, which in 0usize..2) {
        let law = if which == 0 {
            resolve_entry_law(&LawKind::rademacher(1.0), 1).unwrap()
        } else {
            resolve_entry_law(&LawKind::TwoPoint { a: 2.0, p: 0.2 }, 1).unwrap()
        };
        // deg φ = p + 1.
        let mut phi = vec![0.0; k + 1];
        phi[k] = 1.0;
        let c = check_decoupling(&law, &phi, k - 1).unwrap();
        prop_assert!(c.epsilon.abs() <= c.bound * (1.0 + 1e-12));
    }
}

#[test]
fn resolvent_identity_random_pair() {
    let (x1, x2) = (wigner(20, 5), wigner(20, 6));
    let c = check_resolvent_identity(&x1, &x2, Complex64::new(0.3, 0.7)).unwrap();
    assert!(c.deviation <= 1e-10 * c.scale);
    let c = check_resolvent_identity(&x1, &x1, Complex64::new(0.3, 0.7)).unwrap();
    assert_eq!(c.deviation, 0.0);
}

#[test]
fn resolvent_derivatives_random() {
    let x = wigner(12, 7);
    for (p, q) in [(0, 1), (3, 3), (5, 2)] {
        let c = check_resolvent_derivatives(&x, Complex64::new(0.2, 0.5), p, q).unwrap();
        assert!(c.real <= 1e-6, "({p},{q}) {}", c.real);
        assert!(c.max_entry <= 1.0 / 0.5 + 1e-12);
    }
    let h = hermitian(10, 8);
    for (p, q) in [(0, 1), (4, 4), (7, 2)] {
        let c = check_resolvent_derivatives(&h, Complex64::new(-0.4, 0.3), p, q).unwrap();
        assert!(c.real <= 1e-6);
        if p != q {
            assert!(c.imag.unwrap() <= 1e-6);
        }
    }
}

#[test]
fn resolvent_entry_bound() {
    let x = hermitian(25, 9);
    for k in 0..20 {
        let z = Complex64::new(-3.0 + 0.3 * k as f64, 0.05 + 0.1 * k as f64);
        let n = x.rows();
        let a = Mat::from_fn(n, n, |i, j| if i == j { z - x[(i, j)] } else { -x[(i, j)] });
        let r = Lu::factor(a).unwrap().inverse();
        assert!(r.max_abs() <= 1.0 / z.im * (1.0 + 1e-12));
    }
}

#[test]
fn random_block_perturbations() {
    let mut rng = stream(10, 0, Purpose::Auxiliary);
    let eps = 0.05;
    for _ in 0..1000 {
        let b = check_block_perturbation((3, 3), 1.0, eps, &mut rng).unwrap();
        assert!(b.shift <= 10.0 * eps * eps);
        assert!(b.shift <= b.bound * (1.0 + 1e-9));
        assert!((b.epsilon - eps).abs() < 1e-12);
    }
    let b = check_block_perturbation((2, 4), 1.0, 0.0, &mut rng).unwrap();
    assert!(b.shift < 1e-14);
}
