use gmshrink::shrinkage::{
    apply_policy, rule_model1, rule_model2, LevelPolicy, ModelIIParams, ModelIParams, Rule,
};
use gmshrink::wavelet::{dwt, filter};
use proptest::prelude::*;

/// Posterior mean under `eps delta_0 + (1 - eps)/2 (delta_-m + delta_m)`
/// with likelihood `lik(d - theta)`.
fn posterior_mean(d: f64, eps: f64, m: f64, lik: impl Fn(f64) -> f64) -> f64 {
    let w0 = eps * lik(d);
    let wp = 0.5 * (1.0 - eps) * lik(d - m);
    let wm = 0.5 * (1.0 - eps) * lik(d + m);
    m * (wp - wm) / (w0 + wp + wm)
}

fn normal(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

fn laplace(lambda: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (-lambda * x.abs()).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn model1_is_the_posterior_mean(eps in 0.0f64..0.999, m in 0.1f64..4.0, d in -6.0f64..6.0) {
        let got = rule_model1(d, &ModelIParams::new(eps, m).unwrap());
        let want = posterior_mean(d, eps, m, normal);
        prop_assert!((got - want).abs() < 1e-11 * m.max(1.0));
    }

    #[test]
    fn model2_is_the_posterior_mean(
        eps in 0.0f64..0.999, m in 0.1f64..4.0, mu in 0.2f64..5.0, d in -8.0f64..8.0,
    ) {
        let p = ModelIIParams::new(eps, m, mu).unwrap();
        let got = rule_model2(d, &p);
        let want = posterior_mean(d, eps, m, laplace(p.lambda()));
        prop_assert!((got - want).abs() < 1e-11 * m.max(1.0));
    }

    #[test]
    fn odd_and_bounded(
        eps in 0.0f64..1.0, m in 0.05f64..10.0, mu in 0.05f64..10.0, d in -1e4f64..1e4,
    ) {
        let p1 = ModelIParams::new(eps, m).unwrap();
        let p2 = ModelIIParams::new(eps, m, mu).unwrap();
        for r in [rule_model1(d, &p1), rule_model2(d, &p2)] {
            prop_assert!(r.is_finite());
            prop_assert!(r.abs() <= m);
        }
        prop_assert_eq!(rule_model1(-d, &p1), -rule_model1(d, &p1));
        prop_assert_eq!(rule_model2(-d, &p2), -rule_model2(d, &p2));
    }

    #[test]
    fn model2_plateau(eps in 0.0f64..0.99, m in 0.1f64..5.0, mu in 0.1f64..5.0, t in 0.0f64..50.0) {
        let p = ModelIIParams::new(eps, m, mu).unwrap();
        let edge = rule_model2(m, &p);
        prop_assert!((rule_model2(m + t, &p) - edge).abs() < 1e-12);
        prop_assert!((rule_model2(-m - t, &p) + edge).abs() < 1e-12);
    }

    #[test]
    fn more_mass_at_zero_shrinks_harder(
        e1 in 0.0f64..0.98, gap in 0.01f64..0.5, m in 0.2f64..4.0, d in 0.01f64..8.0,
    ) {
        let e2 = (e1 + gap).min(0.999);
        let a = rule_model1(d, &ModelIParams::new(e1, m).unwrap());
        let b = rule_model1(d, &ModelIParams::new(e2, m).unwrap());
        prop_assert!(b <= a);
        let a = rule_model2(d, &ModelIIParams::new(e1, m, 1.0).unwrap());
        let b = rule_model2(d, &ModelIIParams::new(e2, m, 1.0).unwrap());
        prop_assert!(b <= a);
    }
}

#[test]
fn model1_is_monotone_on_a_dense_grid() {
    for &(eps, m) in &[(0.0, 1.0), (0.5, 3.0), (0.7, 3.0), (0.95, 2.8), (0.999, 6.0)] {
        let p = ModelIParams::new(eps, m).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=10_000 {
            let d = -12.0 + 24.0 * i as f64 / 10_000.0;
            let r = rule_model1(d, &p);
            assert!(r >= prev, "eps {eps} m {m} d {d}");
            prev = r;
        }
    }
}

#[test]
fn model1_approaches_the_bound() {
    for &(eps, m) in &[(0.3, 0.2), (0.9, 1.0), (0.99, 3.0)] {
        let p = ModelIParams::new(eps, m).unwrap();
        let far = 1e3 * (1.0f64).max(1.0 / m);
        assert!((rule_model1(far, &p) - m).abs() < 1e-9);
        assert!((rule_model1(-far, &p) + m).abs() < 1e-9);
    }
}

#[test]
fn casella_strawderman_case_is_tanh() {
    for &m in &[0.3, 1.0, 1.05674] {
        let p = ModelIParams::new(0.0, m).unwrap();
        for i in -50..=50 {
            let d = i as f64 / 10.0;
            assert!((rule_model1(d, &p) - m * (m * d).tanh()).abs() < 1e-12);
        }
    }
}

#[test]
fn policy_examples() {
    let bank = filter("haar").unwrap();
    let y = [3.0, -1.0, 0.5, 2.0, 0.0, 0.0, 1.0, -4.0];
    let decomp = dwt(&y, &bank, 0).unwrap();

    let mut all_zero = LevelPolicy::new(1.0).unwrap();
    for j in decomp.levels() {
        all_zero.insert(j, Rule::ModelI(ModelIParams::new(1.0, 2.0).unwrap()));
    }
    let out = apply_policy(&decomp, &all_zero).unwrap();
    assert_eq!(out.scaling(), decomp.scaling());
    for j in out.levels() {
        assert!(out.detail(j).unwrap().iter().all(|v| *v == 0.0));
    }

    let zeros = dwt(&[0.0; 8], &bank, 0).unwrap();
    let p2 = Rule::ModelII(ModelIIParams::new(0.5, 1.0, 2.0).unwrap());
    let mut pol = LevelPolicy::new(1.0).unwrap();
    for j in zeros.levels() {
        pol.insert(j, p2);
    }
    let out = apply_policy(&zeros, &pol).unwrap();
    assert!(out.levels().all(|j| out.detail(j).unwrap().iter().all(|v| *v == 0.0)));

    // One detail equal to 1 with sigma = 1 maps to r1(1; 0.5, 1).
    let single = gmshrink::wavelet::WaveletDecomposition::from_parts(0, vec![0.0], vec![vec![1.0]]).unwrap();
    let pol = LevelPolicy::new(1.0)
        .unwrap()
        .with_level(0, Rule::ModelI(ModelIParams::new(0.5, 1.0).unwrap()));
    let out = apply_policy(&single, &pol).unwrap();
    assert!((out.detail(0).unwrap()[0] - 0.368_193_649_992_211_8).abs() < 1e-14);
}
