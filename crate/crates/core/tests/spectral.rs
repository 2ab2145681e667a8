use deformed_wigner::ensemble::{sample_wigner, WignerSpec};
use deformed_wigner::linalg::{norm, RealMat};
use deformed_wigner::rng::{stream, Purpose};
use deformed_wigner::spectral::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn quadratic_residual_and_conjugate_symmetry_on_grid() {
    for sigma in [0.5, 1.0, 2.0] {
        let sc = Semicircle::new(sigma).unwrap();
        let s2 = sigma * sigma;
        for k in 0..1000 {
            let t = k as f64 / 1000.0 * std::f64::consts::TAU;
            let radius = 2.0 * sigma * (1.05 + 3.0 * (k % 7) as f64 / 7.0);
            let z = Complex64::from_polar(radius, t);
            let z = if z.im == 0.0 { z + Complex64::new(0.0, 1e-3) } else { z };
            let g = sc.stieltjes(z).unwrap();
            let res = (s2 * g * g - z * g + 1.0).norm();
            assert!(res <= 1e-12, "σ={sigma} z={z}: residual {res}");
            let gc = sc.stieltjes(z.conj()).unwrap();
            assert!((gc - g.conj()).norm() <= 1e-15 * g.norm().max(1.0));
            // Decay branch: Im g has the opposite sign to Im z.
            assert!(g.im * z.im <= 0.0);
        }
    }
}

#[test]
fn stieltjes_matches_semicircle_integral() {
    let sc = Semicircle::new(1.0).unwrap();
    for x in [2.3, 3.0, -4.5, 10.0] {
        let direct = sc.integrate(|t| 1.0 / (x - t));
        assert!((direct - sc.stieltjes_real(x).unwrap()).abs() < 1e-9, "x = {x}");
    }
}

#[test]
fn cdf_derivative_is_density() {
    let sc = Semicircle::new(1.3).unwrap();
    let h = 1e-6;
    for k in 1..100 {
        let x = -2.6 + 5.2 * k as f64 / 100.0;
        let fd = (sc.cdf(x + h) - sc.cdf(x - h)) / (2.0 * h);
        assert!((fd - sc.density(x)).abs() < 1e-6, "x = {x}");
    }
}

proptest! {
    #[test]
    fn rho_is_where_g_equals_inverse_theta(sigma in 0.2f64..3.0, ratio in 1.001f64..20.0, sign in prop::bool::ANY) {
        let sc = Semicircle::new(sigma).unwrap();
        let theta = if sign { ratio * sigma } else { -ratio * sigma };
        let rho = sc.rho(theta).unwrap();
        let g = sc.stieltjes_real(rho).unwrap();
        prop_assert!((g - 1.0 / theta).abs() <= 1e-12 / theta.abs().min(1.0));
        let c = sc.c_theta(theta).unwrap();
        let gp = sc.stieltjes_deriv_real(rho).unwrap();
        prop_assert!((c * (theta * theta - sigma * sigma) * g * g - 1.0).abs() <= 1e-12);
        prop_assert!((-1.0 / gp - sc.fluctuation_scale(theta).unwrap()).abs()
            <= 1e-9 * theta * theta);
    }

    #[test]
    fn cdf_is_monotone(sigma in 0.2f64..3.0, a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let sc = Semicircle::new(sigma).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(sc.cdf(lo) <= sc.cdf(hi));
    }
}

#[test]
fn trace_equals_eigenvalue_sum() {
    let spec = WignerSpec::gaussian(50, 1, 1.0);
    let x: RealMat = sample_wigner(&spec, &mut stream(5, 0, Purpose::Matrix)).unwrap();
    let sd = eig_sym(&x, true).unwrap();
    let sum: f64 = sd.eigenvalues.iter().sum();
    let scale = x.inf_norm();
    assert!((sum - x.trace()).abs() <= 1e-9 * 50.0 * scale);
    assert!(sd.max_residual <= 1e-9 * (1.0 + scale));
    assert!(sd.eigenvectors.unwrap().orthonormality_defect() <= 1e-9);
    assert!(sd.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn resolvent_norm_bound_over_random_points() {
    let spec = WignerSpec::gaussian(40, 1, 1.0);
    let x: RealMat = sample_wigner(&spec, &mut stream(6, 0, Purpose::Matrix)).unwrap();
    let mut rng = stream(6, 1, Purpose::Auxiliary);
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..2.0) * if rng.gen() { 1.0 } else { -1.0 });
        let mut u: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut v: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (nu, nv) = (norm(&u), norm(&v));
        u.iter_mut().for_each(|a| *a /= nu);
        v.iter_mut().for_each(|a| *a /= nv);
        let r = resolvent_bilinear(&x, z, &u, &v).unwrap();
        assert!(r.norm() <= 1.0 / z.im.abs() + 1e-12);
    }
}

#[test]
fn projected_route_agrees_with_solves() {
    let spec = WignerSpec::gaussian(60, 2, 1.0);
    let x = sample_wigner::<Complex64, _>(&spec, &mut stream(8, 0, Purpose::Matrix)).unwrap();
    let u: Vec<Complex64> = (0..60).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
    let v: Vec<Complex64> = (0..60).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.2)).collect();
    let proj = eig_projected(&x, &[&u, &v]).unwrap();
    for z in [2.7, -3.1, 4.0] {
        let r = Resolvent::real(&x, z).unwrap();
        let direct = r.bilinear(&u, &v);
        let spectral = proj.bilinear(0, 1, |l| 1.0 / (z - l));
        assert!((direct - spectral).norm() < 1e-11, "z = {z}");
        let sq = proj.bilinear(0, 1, |l| (z - l).powi(-2));
        assert!((r.bilinear_sq(&u, &v) - sq).norm() < 1e-11);
    }
}
