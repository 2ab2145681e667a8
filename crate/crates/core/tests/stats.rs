use deformed_wigner::rng::{stream, Purpose};
use deformed_wigner::stats::*;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn set(v: Vec<f64>) -> SampleSet {
    SampleSet::anonymous(v, "x").unwrap()
}

#[test]
fn normal_sample_variance() {
    let mut rng = stream(1, 0, Purpose::Auxiliary);
    let v: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
    let s = summarize(&set(v), &BootstrapSpec { resamples: 200, level: 0.95 }, &mut rng).unwrap();
    assert!((0.98..=1.02).contains(&s.variance));
    assert!(s.mean_ci.contains(s.mean) && s.variance_ci.contains(s.variance));
    assert!((s.quantiles[2]).abs() < 0.02);
    assert!((s.quantiles[4] - 1.6449).abs() < 0.03);
}

#[test]
fn bootstrap_is_deterministic_and_stabilizes() {
    let mut rng = stream(2, 0, Purpose::Auxiliary);
    let v: Vec<f64> = (0..400).map(|_| rng.sample::<f64, _>(StandardNormal).exp()).collect();
    let a = set(v);
    let run = |b: usize, seed: u64| {
        summarize(&a, &BootstrapSpec { resamples: b, level: 0.9 }, &mut stream(seed, 0, Purpose::Bootstrap)).unwrap()
    };
    assert_eq!(run(500, 3), run(500, 3));
    // Spread of the CI width across seeds shrinks as resamples grow.
    let spread = |b: usize| {
        let w: Vec<f64> = (0..20).map(|s| run(b, s).mean_ci.width()).collect();
        variance(&w).unwrap().sqrt()
    };
    assert!(spread(2000) < spread(50));
}

#[test]
fn ks_against_exact_normal_cdf() {
    use statrs::distribution::{ContinuousCDF, Normal};
    let mut rng = stream(3, 0, Purpose::Auxiliary);
    let v: Vec<f64> = (0..5000).map(|_| rng.sample(StandardNormal)).collect();
    let nd = Normal::new(0.0, 1.0).unwrap();
    let d = ks_one_sample(&set(v), |x| nd.cdf(x)).unwrap();
    // 1.63/√n is the 1% critical value.
    assert!(d < 1.63 / 5000f64.sqrt());
}

#[test]
fn median_rate_of_exact_power_law() {
    let pairs: Vec<(f64, f64)> = [250.0, 500.0, 1000.0, 2000.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.25))).collect();
    let f = rate_fit(&pairs).unwrap();
    assert!((f.slope + 0.25).abs() < 1e-12);
    assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn ks_symmetric_and_transform_invariant(
        a in prop::collection::vec(-10.0f64..10.0, 1..40),
        b in prop::collection::vec(-10.0f64..10.0, 1..40),
    ) {
        let d = ks_two_sample(&set(a.clone()), &set(b.clone())).unwrap();
        prop_assert_eq!(d, ks_two_sample(&set(b.clone()), &set(a.clone())).unwrap());
        prop_assert!((0.0..=1.0).contains(&d));
        let t = |v: &[f64]| set(v.iter().map(|x| x.exp() + x).collect());
        prop_assert_eq!(d, ks_two_sample(&t(&a), &t(&b)).unwrap());
    }

    #[test]
    fn quantiles_are_ordered(v in prop::collection::vec(-5.0f64..5.0, 2..50)) {
        let mut rng = stream(0, 0, Purpose::Bootstrap);
        let s = summarize(&set(v), &BootstrapSpec { resamples: 20, level: 0.9 }, &mut rng).unwrap();
        prop_assert!(s.quantiles.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.variance >= 0.0);
        prop_assert!(s.mean_ci.contains(s.mean));
    }
}
