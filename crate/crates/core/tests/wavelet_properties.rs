use gmshrink::wavelet::{dwt, filter, idwt, standard_filters, FilterBank, WaveletDecomposition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

const BANKS: [&str; 6] = ["haar", "daub6", "daub8", "daub16", "symmlet4", "symmlet8"];

fn flatten(d: &WaveletDecomposition) -> Vec<f64> {
    let mut out = d.scaling().to_vec();
    for level in d.levels() {
        out.extend_from_slice(d.detail(level).unwrap());
    }
    out
}

fn signal_strategy() -> impl Strategy<Value = (Vec<f64>, usize, usize)> {
    scaled_signal_strategy(1.0)
}

fn scaled_signal_strategy(scale: f64) -> impl Strategy<Value = (Vec<f64>, usize, usize)> {
    (1usize..=10).prop_flat_map(move |j| {
        (
            prop::collection::vec(-scale..scale, 1usize << j),
            0..j,
            0..BANKS.len(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn perfect_reconstruction((y, j0, b) in signal_strategy()) {
        let bank = filter(BANKS[b]).unwrap();
        let back = idwt(&dwt(&y, &bank, j0).unwrap(), &bank).unwrap();
        let err = y.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "max error {err}");
    }

    #[test]
    fn parseval((y, j0, b) in scaled_signal_strategy(100.0)) {
        let bank = filter(BANKS[b]).unwrap();
        let energy: f64 = y.iter().map(|v| v * v).sum();
        let coef = dwt(&y, &bank, j0).unwrap().energy();
        prop_assert!((energy - coef).abs() <= 1e-10 * energy.max(1e-300));
    }

    #[test]
    fn linearity(
        (y, j0, b) in signal_strategy(),
        a in -3.0f64..3.0,
        c in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let bank = filter(BANKS[b]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..y.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mix: Vec<f64> = y.iter().zip(&z).map(|(u, v)| a * u + c * v).collect();
        let lhs = flatten(&dwt(&mix, &bank, j0).unwrap());
        let dy = flatten(&dwt(&y, &bank, j0).unwrap());
        let dz = flatten(&dwt(&z, &bank, j0).unwrap());
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * dy[i] + c * dz[i])).abs() < 1e-10);
        }
    }
}

#[test]
fn white_noise_stays_white() {
    let n = 256;
    let reps = 400;
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for name in BANKS {
        let bank = filter(name).unwrap();
        let mut sums = [0.0; 8];
        let mut counts = [0usize; 8];
        for _ in 0..reps {
            let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let d = dwt(&y, &bank, 3).unwrap();
            for level in d.levels() {
                let band = d.detail(level).unwrap();
                sums[level] += band.iter().map(|v| v * v).sum::<f64>();
                counts[level] += band.len();
            }
        }
        for level in 3..8 {
            let var = sums[level] / counts[level] as f64;
            // Var(z^2) = 2 for standard normal z.
            let se = (2.0 / counts[level] as f64).sqrt();
            assert!((var - 1.0).abs() < 3.0 * se, "{name} level {level}: {var}");
        }
    }
}

/// Largest deviation of the unwrapped phase of `H(w)` from its least-squares
/// line on `[0, pi/2]`.
fn phase_nonlinearity(bank: &FilterBank) -> f64 {
    let pts = 512;
    let mut w = Vec::with_capacity(pts);
    let mut phase = Vec::with_capacity(pts);
    let mut prev = 0.0;
    let mut offset = 0.0;
    for i in 0..pts {
        let omega = std::f64::consts::FRAC_PI_2 * i as f64 / (pts - 1) as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, h) in bank.lowpass().iter().enumerate() {
            re += h * (omega * k as f64).cos();
            im -= h * (omega * k as f64).sin();
        }
        let raw = im.atan2(re);
        if i > 0 {
            let jump = raw + offset - prev;
            if jump > std::f64::consts::PI {
                offset -= 2.0 * std::f64::consts::PI;
            } else if jump < -std::f64::consts::PI {
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        prev = raw + offset;
        w.push(omega);
        phase.push(prev);
    }
    let n = pts as f64;
    let mw = w.iter().sum::<f64>() / n;
    let mp = phase.iter().sum::<f64>() / n;
    let slope = w.iter().zip(&phase).map(|(a, b)| (a - mw) * (b - mp)).sum::<f64>()
        / w.iter().map(|a| (a - mw) * (a - mw)).sum::<f64>();
    w.iter()
        .zip(&phase)
        .map(|(a, b)| (b - (mp + slope * (a - mw))).abs())
        .fold(0.0, f64::max)
}

#[test]
fn symmlets_are_closer_to_linear_phase() {
    let pairs = [("symmlet4", "daub8"), ("symmlet8", "daub16")];
    for (sym, daub) in pairs {
        let s = phase_nonlinearity(&filter(sym).unwrap());
        let d = phase_nonlinearity(&filter(daub).unwrap());
        assert!(s < d, "{sym} {s} vs {daub} {d}");
    }
}

#[test]
fn every_standard_bank_is_orthonormal() {
    for (name, bank) in standard_filters() {
        let (sum_err, ortho_err) = bank.invariant_errors();
        assert!(sum_err < 1e-12 && ortho_err < 1e-12, "{name}");
    }
}

#[test]
fn test_signals_reconstruct() {
    use gmshrink::signals::{generate, SignalName};
    for name in SignalName::ALL {
        let y = generate(name, 1024).unwrap().into_samples();
        for bank in ["haar", "daub6", "symmlet8"] {
            let bank = filter(bank).unwrap();
            let back = idwt(&dwt(&y, &bank, 3).unwrap(), &bank).unwrap();
            let err = y.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{name}: {err}");
        }
    }
}
