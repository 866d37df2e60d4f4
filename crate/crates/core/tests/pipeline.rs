use gmshrink::bench::{denoise, mse, run_simulation, DenoiseOptions, RuleKind, SimulationConfig};
use gmshrink::elicitation::{estimate_sigma, ElicitationConfig};
use gmshrink::signals::{
    add_noise, derive_seed, generate, noisy_test_signal, rescale_to_snr, NoiseSpec, Signal, SignalName,
};
use gmshrink::wavelet::filter;

fn norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn every_signal_hits_its_snr() {
    for name in SignalName::ALL {
        let s = generate(name, 1024).unwrap();
        for (snr, sigma) in [(0.2, 1.0), (3.0, 0.5), (7.0, 2.0)] {
            let r = rescale_to_snr(&s, snr, sigma).unwrap();
            assert!((r.sd() / sigma - snr).abs() < 1e-12, "{name}");
        }
    }
}

#[test]
fn noise_has_the_requested_variance() {
    let zero = Signal::new(vec![0.0; 4096]).unwrap();
    for seed in 0..20 {
        let e = add_noise(&zero, &NoiseSpec::new(1.0, seed).unwrap());
        let var = e.samples().iter().map(|v| v * v).sum::<f64>() / 4096.0;
        assert!((0.9..=1.1).contains(&var), "seed {seed}: {var}");
    }
}

#[test]
fn mad_estimate_is_consistent_for_white_noise() {
    let zero = Signal::new(vec![0.0; 4096]).unwrap();
    for seed in 0..100 {
        let e = add_noise(&zero, &NoiseSpec::new(1.0, derive_seed(99, seed)).unwrap());
        let s = estimate_sigma(e.samples()).unwrap();
        assert!((0.9..=1.1).contains(&s), "seed {seed}: {s}");
    }
}

#[test]
fn mad_estimate_is_location_and_scale_equivariant() {
    let zero = Signal::new(vec![0.0; 513]).unwrap();
    let x = add_noise(&zero, &NoiseSpec::new(1.0, 5).unwrap()).into_samples();
    let base = estimate_sigma(&x).unwrap();
    let shifted: Vec<f64> = x.iter().map(|v| v + 17.0).collect();
    let scaled: Vec<f64> = x.iter().map(|v| 3.5 * v).collect();
    assert!((estimate_sigma(&shifted).unwrap() - base).abs() < 1e-12);
    assert!((estimate_sigma(&scaled).unwrap() - 3.5 * base).abs() < 1e-12);
}

#[test]
fn denoising_heavisine_beats_the_raw_data() {
    let bank = filter("symmlet8").unwrap();
    let opts = DenoiseOptions {
        elicitation: ElicitationConfig::new(5.8, 2.4).unwrap(),
        ..DenoiseOptions::default()
    };
    let reps = 100;
    let mut wins = 0;
    for r in 0..reps {
        let noise = NoiseSpec::new(1.0, derive_seed(7, r)).unwrap();
        let (clean, noisy) = noisy_test_signal(SignalName::HeaviSine, 1024, 0.2, &noise).unwrap();
        let est = denoise(noisy.samples(), RuleKind::ModelI, &bank, &opts).unwrap();
        if mse(clean.samples(), &est.estimate).unwrap() < mse(clean.samples(), noisy.samples()).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 95, "{wins} of {reps}");
}

#[test]
fn second_pass_moves_less_than_the_first() {
    let bank = filter("symmlet8").unwrap();
    let opts = DenoiseOptions::default();
    for (name, rule) in [(SignalName::HeaviSine, RuleKind::ModelI), (SignalName::Doppler, RuleKind::ModelII)] {
        let noise = NoiseSpec::new(1.0, 11).unwrap();
        let (_, y) = noisy_test_signal(name, 1024, 0.25, &noise).unwrap();
        let once = denoise(y.samples(), rule, &bank, &opts).unwrap().estimate;
        let twice = denoise(&once, rule, &bank, &opts).unwrap().estimate;
        assert!(norm(&twice, &once) < norm(&once, y.samples()), "{name}");
    }
}

#[test]
fn model2_uses_the_squared_noise_level() {
    let bank = filter("symmlet8").unwrap();
    let noise = NoiseSpec::new(1.0, 3).unwrap();
    let (_, y) = noisy_test_signal(SignalName::HeaviSine, 256, 0.2, &noise).unwrap();
    let fixed = DenoiseOptions {
        sigma: Some(0.5),
        ..DenoiseOptions::default()
    };
    let out = denoise(y.samples(), RuleKind::ModelII, &bank, &fixed).unwrap();
    assert_eq!(out.sigma_hat, 0.5);
    assert!(!out.sigma_floored);
    assert!(denoise(y.samples(), RuleKind::ModelII, &bank, &DenoiseOptions { j0: 8, ..fixed }).is_err());
}

#[test]
fn doing_nothing_costs_the_noise_variance() {
    let cfg = SimulationConfig {
        signals: vec![SignalName::Bumps],
        snr: vec![1.0],
        replications: 1,
        rules: vec![RuleKind::NoisyIdentity],
        ..SimulationConfig::default()
    };
    let report = run_simulation(&cfg).unwrap();
    let amse = report.cells[0].amse;
    // sd of one replication's MSE is sqrt(2 / 1024).
    assert!((amse - 1.0).abs() < 4.0 * (2.0f64 / 1024.0).sqrt(), "{amse}");
}

#[test]
fn simulation_is_reproducible_and_consistent() {
    let cfg = SimulationConfig {
        signals: vec![SignalName::Wave, SignalName::Blocks],
        n: 256,
        snr: vec![0.25, 3.0],
        replications: 6,
        ..SimulationConfig::default()
    };
    let a = run_simulation(&cfg).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| run_simulation(&cfg).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.cells.len(), 2 * 2 * 4);
    for c in &a.cells {
        let mean = c.mses.iter().sum::<f64>() / c.mses.len() as f64;
        assert!((c.amse - mean).abs() <= 1e-12);
        assert!(c.q25 <= c.median && c.median <= c.q75);
    }
    let wave3 = [RuleKind::ModelI, RuleKind::ModelII].map(|r| a.cell(SignalName::Wave, 3.0, r).unwrap().amse);
    assert!(wave3.iter().all(|v| v.is_finite()));

    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    a.write_summary_csv(&mut s1).unwrap();
    b.write_summary_csv(&mut s2).unwrap();
    assert_eq!(s1, s2);
    let text = String::from_utf8(s1).unwrap();
    assert!(text.starts_with("signal,snr,rule,amse,q25,median,q75\n"));
    assert_eq!(text.lines().count(), 1 + a.cells.len());
}

#[test]
fn reordering_the_config_keeps_each_cell() {
    let base = SimulationConfig {
        signals: vec![SignalName::Wave, SignalName::Step],
        n: 128,
        replications: 3,
        ..SimulationConfig::default()
    };
    let flipped = SimulationConfig {
        signals: vec![SignalName::Step, SignalName::Wave],
        rules: base.rules.iter().rev().copied().collect(),
        ..base.clone()
    };
    let a = run_simulation(&base).unwrap();
    let b = run_simulation(&flipped).unwrap();
    for c in &a.cells {
        assert_eq!(b.cell(c.signal, c.snr, c.rule).unwrap().mses, c.mses);
    }
}

#[test]
fn bundled_config_parses() {
    let text = include_str!("../configs/desk.json");
    let cfg = SimulationConfig::from_json(text).unwrap();
    assert_eq!(cfg.signals.len(), 10);
    assert_eq!(cfg.replications, 20);
    assert_eq!(cfg.bank_for(SignalName::Bumps).unwrap().name(), "daub6");
    assert_eq!(cfg.bank_for(SignalName::Wave).unwrap().name(), "symmlet8");
}
