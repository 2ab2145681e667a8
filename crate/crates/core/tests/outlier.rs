use deformed_wigner::ensemble::*;
use deformed_wigner::linalg::{eig_sym, RealMat};
use deformed_wigner::outlier::*;
use deformed_wigner::rng::{stream, Purpose};
use deformed_wigner::spectral::Semicircle;

fn delocalized(spikes: &[Spike], n: usize, seed: u64) -> Deformation {
    let mode = DeformationMode::RandomDelocalized {
        method: DelocalizationMethod::Qr,
    };
    build_deformation(spikes, &mode, n, &mut stream(seed, 0, Purpose::Deformation)).unwrap()
}

fn sample(n: usize, seed: u64, trial: u64) -> RealMat {
    sample_wigner(&WignerSpec::gaussian(n, 1, 1.0), &mut stream(seed, trial, Purpose::Matrix)).unwrap()
}

#[test]
fn determinant_vanishes_exactly_on_the_deformed_spectrum() {
    let n = 16;
    let spikes = [Spike::new(3.0, 1), Spike::new(1.5, 1), Spike::new(-2.0, 1)];
    for trial in 0..10 {
        let x = sample(n, 31, trial);
        let d = delocalized(&spikes, n, trial);
        let m = assemble(x.clone(), d.clone()).unwrap().m();
        let sx = eig_sym(&x, false).unwrap();
        let sm = eig_sym(&m, false).unwrap();
        for &l in &sm.eigenvalues {
            if sx.distance_to(l) <= 1e-6 {
                continue;
            }
            let f = master_det_with_tolerance(&x, &d, l, 1e-12).unwrap();
            assert!(f.relative() <= 1e-8, "trial {trial}: λ = {l}, relative det {}", f.relative());
        }
        for w in sm.eigenvalues.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if sx.distance_to(mid) <= 1e-6 {
                continue;
            }
            let f = master_det_with_tolerance(&x, &d, mid, 1e-12).unwrap();
            assert!(f.value.abs() >= 1e-4, "trial {trial}: midpoint {mid}, det {}", f.value);
        }
    }
}

#[test]
fn z_matrix_criterion_agrees_with_determinant() {
    let n = 16;
    let sigma = 1.0;
    let sc = Semicircle::new(sigma).unwrap();
    let spikes = [Spike::new(4.0, 1), Spike::new(3.0, 1)];
    for trial in 0..10 {
        let x = sample(n, 32, trial);
        let d = delocalized(&spikes, n, 100 + trial);
        let m = assemble(x.clone(), d.clone()).unwrap().m();
        let sm = eig_sym(&m, false).unwrap();
        let top = eig_sym(&x, false).unwrap().largest().max(2.0 * sigma);
        for &l in sm.eigenvalues.iter().filter(|&&l| l > top + 1e-6) {
            let xi = xi_full(&x, &d, l, sigma).unwrap();
            let z = z_matrix(&d, &xi).unwrap();
            let g = sc.stieltjes_real(l).unwrap();
            let gap = eig_sym(&z, false)
                .unwrap()
                .eigenvalues
                .iter()
                .map(|e| (e - g).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(gap <= 1e-8, "trial {trial}: λ = {l}, gap {gap}");
            assert!(master_det(&x, &d, l).unwrap().relative() <= 1e-8);
        }
    }
}

#[test]
fn root_count_near_rho_matches_multiplicity() {
    let n = 400;
    let spikes = [Spike::new(3.0, 2)];
    let x = sample(n, 33, 0);
    let d = delocalized(&spikes, n, 7);
    let rho = Semicircle::new(1.0).unwrap().rho(3.0).unwrap();
    let mut roots = 0;
    let mut prev = master_det(&x, &d, rho - 0.6).unwrap().value;
    let steps = 400;
    for k in 1..=steps {
        let p = rho - 0.6 + 1.2 * k as f64 / steps as f64;
        let f = master_det(&x, &d, p).unwrap().value;
        if f.signum() != prev.signum() {
            roots += 1;
        }
        prev = f;
    }
    assert_eq!(roots, 2);
    let m = assemble(x, d).unwrap().m();
    let sm = eig_sym(&m, false).unwrap();
    assert_eq!(sm.eigenvalues.iter().filter(|&&l| (l - rho).abs() < 0.6).count(), 2);
}

#[test]
fn xi_entries_are_tight() {
    let n = 200;
    let d = delocalized(&[Spike::new(2.0, 2)], n, 5);
    let block = d.spike_block::<f64>(0);
    let trials = 300;
    let mut small = 0;
    for t in 0..trials {
        let x = sample(n, 34, t);
        let xi = xi_matrix(&x, &block, 2.5, 2.0).unwrap();
        assert!(xi.asymmetry <= SYMMETRY_TOLERANCE);
        if xi.matrix.max_abs() < 10.0 {
            small += 1;
        }
    }
    assert!(small as f64 >= 0.99 * trials as f64);
}

#[test]
fn zeta_scan_matches_direct_solves() {
    let n = 120;
    let x = sample(n, 35, 0);
    let d = delocalized(&[Spike::new(2.0, 2)], n, 11);
    let u = d.column::<f64>(0);
    let v = d.column::<f64>(1);
    let w = ResolventWindow::for_spikes(1.0, &[2.0], n, None).unwrap();
    let scan = zeta_scan(&x, &w, &u, &v, 1.0).unwrap();
    let direct = w
        .grid
        .iter()
        .map(|&p| zeta_at(&x, p, &u, &v, 1.0).unwrap())
        .fold(0.0, f64::max);
    assert!((scan.max_abs - direct).abs() <= 1e-9 * (1.0 + direct));
    // ‖X‖ < 2σ + δ/2 here, so the cutoff changes nothing.
    assert!(eig_sym(&x, false).unwrap().largest() < 2.0 + w.delta / 2.0);
    assert!((scan.max_abs - scan.max_abs_cutoff).abs() <= 1e-12 * (1.0 + direct));
}

#[test]
fn outlier_count_above_edge() {
    let n = 400;
    let spikes = [Spike::new(3.0, 1), Spike::new(2.0, 1)];
    let pred = predict_outliers(&spikes, 1.0, n).unwrap();
    let w = ResolventWindow::for_spikes(1.0, &[3.0, 2.0], n, None).unwrap();
    let mut hits = 0;
    let trials = 30;
    for t in 0..trials {
        let x = sample(n, 36, t);
        let d = delocalized(&spikes, n, 1000 + t);
        let m = assemble(x, d).unwrap().m();
        let count = eig_sym(&m, false)
            .unwrap()
            .eigenvalues
            .iter()
            .filter(|&&l| l > 2.0 + w.delta)
            .count();
        hits += (count == pred.k_plus) as usize;
    }
    assert_eq!(hits, trials as usize);
}

#[test]
fn relative_determinant_separates_roots_for_rank_one() {
    let n = 30;
    let x = sample(n, 34, 0);
    let spikes = [Spike::new(3.0, 1)];
    let d = build_deformation(&spikes, &DeformationMode::CanonicalLocalized { block: None }, n, &mut stream(0, 0, Purpose::Deformation)).unwrap();
    let m = assemble(x.clone(), d.clone()).unwrap().m();
    let top = eig_sym(&m, false).unwrap().largest();
    assert!(master_det(&x, &d, top).unwrap().relative() <= 1e-8);
    // Off the spectrum the normalized residual stays of order one.
    let off = master_det(&x, &d, top + 0.5).unwrap().relative();
    assert!(off >= 1e-2 && off <= 1.0, "{off}");
}
