//! Standard test signals, SNR rescaling and seeded Gaussian noise.
//!
//! Signals are sampled at `t_i = i / n`, `i = 1..=n`. Definitions:
//!
//! | name | f(t) |
//! |------|------|
//! | step | `0.2 + 0.6 * 1{1/3 < t <= 3/4}` |
//! | wave | `0.5 + 0.2 cos(4 pi t) + 0.1 cos(24 pi t)` |
//! | blip | `(0.32 + 0.6 t + 0.3 e^{-100 (t - 0.3)^2}) 1{t <= 0.8} + (-0.28 + 0.6 t + 0.3 e^{-100 (t - 1.3)^2}) 1{t > 0.8}` |
//! | blocks | `sum_j h_j (1 + sgn(t - t_j)) / 2` |
//! | bumps | `sum_j h_j (1 + abs(t - t_j) / w_j)^-4` |
//! | heavisine | `4 sin(4 pi t) - sgn(t - 0.3) - sgn(0.72 - t)` |
//! | doppler | `sqrt(t (1 - t)) sin(2 pi 1.05 / (t + 0.05))` |
//! | angles | piecewise linear with knots at 0.15, 0.2, 0.5, 0.6, 0.65, 0.85 |
//! | parabolas | `0.8 + sum_j a_j r(t - s_j)`, `r(x) = x^2 1{x >= 0}` |
//! | time_shifted_sine | `0.3 sin(3 pi u) + 0.5` with `u = 4 (t - 0.5)^3 + 0.5` |
//!
//! Blocks and bumps use the usual eleven knots
//! `0.10 0.13 0.15 0.23 0.25 0.40 0.44 0.65 0.76 0.78 0.81`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::wavelet::dyadic_level;

/// Generator used for all noise; `seed_from_u64` on ChaCha20 is stable across
/// platforms.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

const KNOTS: [f64; 11] = [
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
const BLOCK_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMP_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMP_WIDTHS: [f64; 11] = [
    0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005,
];
const PARABOLA_TERMS: [(f64, f64); 10] = [
    (-30.0, 0.1),
    (60.0, 0.2),
    (-30.0, 0.3),
    (500.0, 0.35),
    (-1000.0, 0.37),
    (1000.0, 0.41),
    (-500.0, 0.43),
    (7.5, 0.5),
    (-15.0, 0.7),
    (7.5, 0.9),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalName {
    Step,
    Wave,
    Blip,
    Blocks,
    Bumps,
    HeaviSine,
    Doppler,
    Angles,
    Parabolas,
    TimeShiftedSine,
}

impl SignalName {
    pub const ALL: [SignalName; 10] = [
        SignalName::Step,
        SignalName::Wave,
        SignalName::Blip,
        SignalName::Blocks,
        SignalName::Bumps,
        SignalName::HeaviSine,
        SignalName::Doppler,
        SignalName::Angles,
        SignalName::Parabolas,
        SignalName::TimeShiftedSine,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SignalName::Step => "step",
            SignalName::Wave => "wave",
            SignalName::Blip => "blip",
            SignalName::Blocks => "blocks",
            SignalName::Bumps => "bumps",
            SignalName::HeaviSine => "heavisine",
            SignalName::Doppler => "doppler",
            SignalName::Angles => "angles",
            SignalName::Parabolas => "parabolas",
            SignalName::TimeShiftedSine => "time_shifted_sine",
        }
    }

    /// The test function at a single point of `[0, 1]`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            SignalName::Step => {
                if t > 1.0 / 3.0 && t <= 0.75 {
                    0.8
                } else {
                    0.2
                }
            }
            SignalName::Wave => 0.5 + 0.2 * (4.0 * PI * t).cos() + 0.1 * (24.0 * PI * t).cos(),
            SignalName::Blip => {
                if t <= 0.8 {
                    0.32 + 0.6 * t + 0.3 * (-100.0 * (t - 0.3).powi(2)).exp()
                } else {
                    -0.28 + 0.6 * t + 0.3 * (-100.0 * (t - 1.3).powi(2)).exp()
                }
            }
            SignalName::Blocks => KNOTS
                .iter()
                .zip(BLOCK_HEIGHTS)
                .map(|(&k, h)| h * 0.5 * (1.0 + sgn(t - k)))
                .sum(),
            SignalName::Bumps => KNOTS
                .iter()
                .zip(BUMP_HEIGHTS)
                .zip(BUMP_WIDTHS)
                .map(|((&k, h), w)| h * (1.0 + ((t - k) / w).abs()).powi(-4))
                .sum(),
            SignalName::HeaviSine => 4.0 * (4.0 * PI * t).sin() - sgn(t - 0.3) - sgn(0.72 - t),
            SignalName::Doppler => (t * (1.0 - t)).max(0.0).sqrt() * (2.0 * PI * 1.05 / (t + 0.05)).sin(),
            SignalName::Angles => angles(t),
            SignalName::Parabolas => {
                let ramp = |x: f64| if x >= 0.0 { x * x } else { 0.0 };
                0.8 + PARABOLA_TERMS
                    .iter()
                    .map(|&(a, s)| a * ramp(t - s))
                    .sum::<f64>()
            }
            SignalName::TimeShiftedSine => {
                let u = 4.0 * (t - 0.5).powi(3) + 0.5;
                0.3 * (3.0 * PI * u).sin() + 0.5
            }
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn angles(t: f64) -> f64 {
    if t <= 0.15 {
        2.0 * t + 0.5
    } else if t <= 0.2 {
        -12.0 * (t - 0.15) + 0.8
    } else if t <= 0.5 {
        0.2
    } else if t <= 0.6 {
        6.0 * (t - 0.5) + 0.2
    } else if t <= 0.65 {
        -10.0 * (t - 0.6) + 0.8
    } else if t <= 0.85 {
        -0.5 * (t - 0.65) + 0.3
    } else {
        2.0 * (t - 0.85) + 0.2
    }
}

impl fmt::Display for SignalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignalName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        let key = match key.as_str() {
            "time_shifted_sine" | "timeshiftedsine" | "timeshifted_sine" => "time_shifted_sine",
            other => other,
        };
        SignalName::ALL
            .into_iter()
            .find(|n| n.as_str() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "signal",
                name: s.to_string(),
            })
    }
}

impl Serialize for SignalName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SignalName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Samples on the equispaced grid `t_i = i / n`, `i = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid(format!(
                "a signal needs at least two samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Design point of sample `i` (zero-based).
    pub fn t(&self, i: usize) -> f64 {
        grid_point(i, self.samples.len())
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Population standard deviation.
    pub fn sd(&self) -> f64 {
        let mean = self.mean();
        let ss: f64 = self.samples.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / self.samples.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

pub fn grid_point(i: usize, n: usize) -> f64 {
    (i + 1) as f64 / n as f64
}

/// Samples the named test function at `n = 2^J` points.
pub fn generate(name: SignalName, n: usize) -> Result<Signal> {
    dyadic_level(n)?;
    Signal::new((0..n).map(|i| name.evaluate(grid_point(i, n))).collect())
}

/// Scales about the mean so that `sd(output) / sigma = snr`.
pub fn rescale_to_snr(signal: &Signal, snr: f64, sigma: f64) -> Result<Signal> {
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(invalid(format!("snr must be positive, got {snr}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let sd = signal.sd();
    if sd == 0.0 {
        return Err(Error::ConstantSignal);
    }
    let mean = signal.mean();
    let gain = snr * sigma / sd;
    Signal::new(
        signal
            .samples
            .iter()
            .map(|v| mean + (v - mean) * gain)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("noise sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, seed })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Adds i.i.d. `N(0, sigma^2)` noise drawn from a ChaCha20 stream keyed by the seed.
pub fn add_noise(signal: &Signal, spec: &NoiseSpec) -> Signal {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let samples = signal
        .samples
        .iter()
        .map(|v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + spec.sigma * z
        })
        .collect();
    Signal { samples }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `index` under a master seed; distinct indices give
/// independent streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Clean signal at the requested SNR plus one noisy realisation.
pub fn noisy_test_signal(
    name: SignalName,
    n: usize,
    snr: f64,
    noise: &NoiseSpec,
) -> Result<(Signal, Signal)> {
    let clean = rescale_to_snr(&generate(name, n)?, snr, noise.sigma)?;
    let noisy = add_noise(&clean, noise);
    Ok((clean, noisy))
}
