use deformed_wigner::ensemble::{resolve_entry_law, EntryLaw, LawKind};
use deformed_wigner::limitlaw::*;
use deformed_wigner::linalg::RealMat;
use deformed_wigner::rng::{stream, Purpose};
use deformed_wigner::stats::{ks_two_sample, mean, variance, SampleSet};
use rand::Rng;
use rand_distr::StandardNormal;

const DRAWS: usize = 40_000;

fn sample(f: impl FnMut() -> f64) -> Vec<f64> {
    std::iter::repeat_with(f).take(DRAWS).collect()
}

/// Variance estimate within five standard errors (normal fourth-moment proxy).
fn assert_variance(v: &[f64], expected: f64) {
    let est = variance(v).unwrap();
    let se = expected * (2.0 / v.len() as f64).sqrt() * 2.0;
    assert!((est - expected).abs() <= 5.0 * se, "variance {est} vs {expected}");
}

fn set(v: Vec<f64>) -> SampleSet {
    SampleSet::anonymous(v, "x").unwrap()
}

#[test]
fn gaussian_case_a_is_n_0_8_3() {
    let spec = CaseALimitSpec::iid(2.0, 1.0, 1, RealMat::identity(1), &EntryLaw::gaussian(1.0), &EntryLaw::gaussian(2.0));
    let mut rng = stream(1, 0, Purpose::LimitLaw);
    let v = sample(|| sample_vj(&spec, &mut rng).unwrap()[0]);
    assert!(mean(&v).unwrap().abs() < 5.0 * (8.0 / 3.0 / DRAWS as f64).sqrt());
    assert_variance(&v, 8.0 / 3.0);
}

#[test]
fn rademacher_case_a_matches_direct_construction() {
    let r = EntryLaw::rademacher(1.0);
    let spec = CaseALimitSpec::iid(2.0, 1.0, 1, RealMat::identity(1), &r, &r);
    let mut rng = stream(2, 0, Purpose::LimitLaw);
    let v = sample(|| sample_vj(&spec, &mut rng).unwrap()[0]);
    // ±1 + N(0, 1/6), built without the library.
    let mut rng = stream(2, 1, Purpose::Auxiliary);
    let direct = sample(|| {
        let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        s + (1.0f64 / 6.0).sqrt() * rng.sample::<f64, _>(StandardNormal)
    });
    assert!(ks_two_sample(&set(v.clone()), &set(direct)).unwrap() < 0.02);
    assert_variance(&v, 7.0 / 6.0);
}

#[test]
fn off_diagonal_h_enters_through_a_rotated_vector() {
    // U = (e1 + e2)/√2: Var = (W11 + W22)/4 + W12 + (H11 + H22)/4 + H12.
    let u = RealMat::from_rows(&[vec![0.5f64.sqrt()], vec![0.5f64.sqrt()]]);
    let r = EntryLaw::rademacher(1.0);
    let spec = CaseALimitSpec::iid(2.0, 1.0, 1, u.clone(), &r, &r);
    let mut rng = stream(3, 0, Purpose::LimitLaw);
    let v = sample(|| sample_vj(&spec, &mut rng).unwrap()[0]);
    assert_variance(&v, 0.5 + 1.0 + (1.0 / 6.0 + 1.0 / 6.0) / 4.0 + 1.0 / 3.0);
    let g = CaseALimitSpec::iid(2.0, 1.0, 1, u, &EntryLaw::gaussian(1.0), &EntryLaw::gaussian(2.0));
    let v = sample(|| sample_vj(&g, &mut rng).unwrap()[0]);
    assert_variance(&v, 8.0 / 3.0);
}

#[test]
fn gaussian_case_a_agrees_with_goe_block() {
    let spec = CaseALimitSpec::iid(2.0, 1.0, 1, RealMat::identity(1), &EntryLaw::gaussian(1.0), &EntryLaw::gaussian(2.0));
    let mut rng = stream(4, 0, Purpose::LimitLaw);
    let a = sample(|| sample_vj(&spec, &mut rng).unwrap()[0]);
    let b = sample(|| sample_goe_block(1, 2.0, 1.0, 1, &mut rng).unwrap()[0]);
    assert!(ks_two_sample(&set(a), &set(b)).unwrap() < 0.02);
}

#[test]
fn hermitian_case_a_agrees_with_gue_block() {
    let law = resolve_entry_law(&LawKind::gaussian(1.0), 2).unwrap();
    let spec = CaseALimitSpec::iid(2.0, 1.0, 2, RealMat::identity(1), &law, &EntryLaw::gaussian(1.0));
    let mut rng = stream(5, 0, Purpose::LimitLaw);
    let a = sample(|| sample_vj(&spec, &mut rng).unwrap()[0]);
    assert_variance(&a, 4.0 / 3.0);
    let b = sample(|| sample_goe_block(1, 2.0, 1.0, 2, &mut rng).unwrap()[0]);
    assert!(ks_two_sample(&set(a), &set(b)).unwrap() < 0.02);
}

#[test]
fn gue_block_second_moment() {
    // E Σ λ² = E tr V² = k(2/β)v + k(k−1)v with v = 4/3.
    let mut rng = stream(6, 0, Purpose::LimitLaw);
    let s = sample(|| sample_goe_block(2, 2.0, 1.0, 2, &mut rng).unwrap().iter().map(|l| l * l).sum());
    let m = mean(&s).unwrap();
    let expected = 2.0 * 4.0 / 3.0 + 2.0 * 4.0 / 3.0;
    assert!((m - expected).abs() < 5.0 * (variance(&s).unwrap() / DRAWS as f64).sqrt());
}

#[test]
fn upsilon_diagonal_variance() {
    let spec = UpsilonSpec::new(2.5, 3, EntryLaw::gaussian(1.0), EntryLaw::gaussian(2.0));
    let mut rng = stream(7, 0, Purpose::LimitLaw);
    let mut d = Vec::new();
    let mut o = Vec::new();
    for _ in 0..DRAWS {
        let m = sample_upsilon(&spec, &mut rng).unwrap();
        d.push(m[(0, 0)]);
        o.push(m[(0, 1)]);
        assert_eq!(m[(0, 1)], m[(1, 0)]);
    }
    // g(2.5) = 1/2: (1/16)(2 + 2/3) and (1/16)(1 + 1/3).
    assert_variance(&d, 1.0 / 6.0);
    assert_variance(&o, 1.0 / 12.0);
}

#[test]
fn rank_one_variance_matches_hand_values() {
    let r = EntryLaw::rademacher(1.0);
    let e1 = CaseALimitSpec::iid(2.0, 1.0, 1, RealMat::identity(1), &r, &r);
    assert!((e1.rank_one_variance().unwrap() - 7.0 / 6.0).abs() < 1e-15);
    let u = RealMat::from_rows(&[vec![0.5f64.sqrt()], vec![0.5f64.sqrt()]]);
    let rot = CaseALimitSpec::iid(2.0, 1.0, 1, u.clone(), &r, &r);
    let hand = 0.5 + 1.0 + (1.0 / 6.0 + 1.0 / 6.0) / 4.0 + 1.0 / 3.0;
    assert!((rot.rank_one_variance().unwrap() - hand).abs() < 1e-14);
    let gue = resolve_entry_law(&LawKind::gaussian(1.0), 2).unwrap();
    let h = CaseALimitSpec::iid(2.0, 1.0, 2, u, &gue, &EntryLaw::gaussian(1.0));
    let mut rng = stream(9, 0, Purpose::LimitLaw);
    let v = sample(|| sample_vj(&h, &mut rng).unwrap()[0]);
    assert_variance(&v, h.rank_one_variance().unwrap());
    let two = CaseALimitSpec::iid(2.0, 1.0, 1, RealMat::identity(2), &r, &r);
    assert!(two.rank_one_variance().is_err());
}
