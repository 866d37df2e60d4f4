//! Orthogonal periodic discrete wavelet transform.
//!
//! The forward transform is the decimated Mallat pyramid with circular
//! boundary handling. For a level with input `x` of length `N`:
//!
//! ```text
//! c[k] = sum_n h[n] x[(2k + n) mod N]
//! d[k] = sum_n g[n] x[(2k + n) mod N]
//! ```
//!
//! where `g[n] = (-1)^n h[L - 1 - n]`. The inverse scatters the same taps back,
//! which makes the pair an orthogonal change of basis.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};

const FILTER_TOL: f64 = 1e-12;

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

// Extremal-phase Daubechies filters, 3, 4 and 8 vanishing moments.
const DAUB6: [f64; 6] = [
    0.332_670_552_950_082_63,
    0.806_891_509_311_092_5,
    0.459_877_502_118_491_54,
    -0.135_011_020_010_254_58,
    -0.085_441_273_882_026_66,
    0.035_226_291_885_709_53,
];

const DAUB8: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_7,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_09,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

const DAUB16: [f64; 16] = [
    0.054_415_842_243_104_01,
    0.312_871_590_914_299_95,
    0.675_630_736_297_289_8,
    0.585_354_683_654_206_7,
    -0.015_829_105_256_349_306,
    -0.284_015_542_961_546_9,
    0.000_472_484_573_913_282_8,
    0.128_747_426_620_478_47,
    -0.017_369_301_001_807_547,
    -0.044_088_253_930_794_755,
    0.013_981_027_917_398_282,
    0.008_746_094_047_405_777,
    -0.004_870_352_993_451_574,
    -0.000_391_740_373_376_947_05,
    0.000_675_449_406_450_569_3,
    -0.000_117_476_784_124_769_53,
];

// Least-asymmetric filters, 4 and 8 vanishing moments.
const SYMM4: [f64; 8] = [
    0.032_223_100_604_042_7,
    -0.012_603_967_262_037_833,
    -0.099_219_543_576_847_22,
    0.297_857_795_605_277_36,
    0.803_738_751_805_916_1,
    0.497_618_667_632_015_45,
    -0.029_635_527_645_998_51,
    -0.075_765_714_789_273_33,
];

const SYMM8: [f64; 16] = [
    0.001_889_950_332_759_460_9,
    -0.000_302_920_514_721_366_8,
    -0.014_952_258_337_048_23,
    0.003_808_752_013_890_615,
    0.049_137_179_673_607_506,
    -0.027_219_029_917_056_003,
    -0.051_945_838_107_709_04,
    0.364_441_894_835_331_4,
    0.777_185_751_700_523_5,
    0.481_359_651_258_372_2,
    -0.061_273_359_067_658_524,
    -0.143_294_238_350_809_7,
    0.007_607_487_324_917_605,
    0.031_695_087_811_492_98,
    -0.000_542_132_331_791_148_1,
    -0.003_382_415_951_006_125_6,
];

/// Orthonormal two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    name: String,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterBank {
    /// Builds a bank from its scaling filter, deriving the quadrature-mirror
    /// detail filter. Rejects filters that are not orthonormal to 1e-12.
    pub fn new(name: impl Into<String>, lowpass: Vec<f64>) -> Result<Self> {
        let name = name.into();
        let len = lowpass.len();
        if len == 0 || !len.is_multiple_of(2) {
            return Err(invalid(format!(
                "filter `{name}` must have a positive even length, got {len}"
            )));
        }
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        let bank = Self {
            name,
            lowpass,
            highpass,
        };
        let (sum_err, ortho_err) = bank.invariant_errors();
        if sum_err > FILTER_TOL || ortho_err > FILTER_TOL {
            return Err(invalid(format!(
                "filter `{}` is not orthonormal (sum error {sum_err:e}, shift error {ortho_err:e})",
                bank.name
            )));
        }
        Ok(bank)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Returns `(|sum h - sqrt 2|, max_m |sum_k h[k] h[k+2m] - [m == 0]|)`.
    pub fn invariant_errors(&self) -> (f64, f64) {
        let h = &self.lowpass;
        let sum_err = (h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs();
        let mut ortho_err: f64 = 0.0;
        for shift in (0..h.len()).step_by(2) {
            let dot: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
            let target = if shift == 0 { 1.0 } else { 0.0 };
            ortho_err = ortho_err.max((dot - target).abs());
        }
        (sum_err, ortho_err)
    }
}

/// Every shipped filter bank keyed by identifier.
///
/// `symmlet8` is the 16-tap least-asymmetric filter with eight vanishing
/// moments and `symmlet4` its 8-tap sibling. `symmlet` aliases `symmlet8`.
pub fn standard_filters() -> BTreeMap<&'static str, FilterBank> {
    let table: [(&'static str, &[f64]); 6] = [
        ("haar", &HAAR),
        ("daub6", &DAUB6),
        ("daub8", &DAUB8),
        ("daub16", &DAUB16),
        ("symmlet4", &SYMM4),
        ("symmlet8", &SYMM8),
    ];
    table
        .into_iter()
        .map(|(name, taps)| {
            let bank = FilterBank::new(name, taps.to_vec())
                .expect("shipped filter coefficients are orthonormal");
            (name, bank)
        })
        .collect()
}

/// Looks up a shipped bank by identifier (case-insensitive).
pub fn filter(name: &str) -> Result<FilterBank> {
    let key = name.to_ascii_lowercase();
    let key = match key.as_str() {
        "symmlet" | "sym8" => "symmlet8",
        "sym4" => "symmlet4",
        "db3" | "daubechies6" => "daub6",
        "db4" => "daub8",
        "db8" => "daub16",
        other => other,
    }
    .to_string();
    standard_filters()
        .remove(key.as_str())
        .ok_or_else(|| Error::Unknown {
            kind: "wavelet",
            name: name.to_string(),
        })
}

/// Scaling coefficients at the coarsest level plus one detail band per level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    j0: usize,
    j: usize,
    scaling: Vec<f64>,
    /// `details[i]` holds level `j0 + i`, of length `2^(j0 + i)`.
    details: Vec<Vec<f64>>,
}

impl WaveletDecomposition {
    /// Assembles a decomposition, checking every band has its dyadic size.
    pub fn from_parts(j0: usize, scaling: Vec<f64>, details: Vec<Vec<f64>>) -> Result<Self> {
        let j = j0 + details.len();
        if details.is_empty() {
            return Err(Error::InvalidLevels { j0, j });
        }
        if scaling.len() != 1 << j0 {
            return Err(Error::ShapeMismatch(format!(
                "scaling band has {} coefficients, level {j0} needs {}",
                scaling.len(),
                1usize << j0
            )));
        }
        for (i, band) in details.iter().enumerate() {
            let want = 1usize << (j0 + i);
            if band.len() != want {
                return Err(Error::ShapeMismatch(format!(
                    "detail level {} has {} coefficients, expected {want}",
                    j0 + i,
                    band.len()
                )));
            }
        }
        Ok(Self {
            j0,
            j,
            scaling,
            details,
        })
    }

    pub fn coarsest_level(&self) -> usize {
        self.j0
    }

    /// `J` with `n = 2^J`.
    pub fn finest_level(&self) -> usize {
        self.j
    }

    pub fn len(&self) -> usize {
        1 << self.j
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    /// Detail levels `j0..J` in increasing order.
    pub fn levels(&self) -> std::ops::Range<usize> {
        self.j0..self.j
    }

    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        level
            .checked_sub(self.j0)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    pub fn detail_mut(&mut self, level: usize) -> Option<&mut [f64]> {
        level
            .checked_sub(self.j0)
            .and_then(|i| self.details.get_mut(i))
            .map(Vec::as_mut_slice)
    }

    /// The finest detail band, level `J - 1`.
    pub fn finest_detail(&self) -> &[f64] {
        self.details.last().expect("at least one detail level")
    }

    pub fn energy(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        sq(&self.scaling) + self.details.iter().map(|d| sq(d)).sum::<f64>()
    }

    pub fn into_parts(self) -> (usize, Vec<f64>, Vec<Vec<f64>>) {
        (self.j0, self.scaling, self.details)
    }
}

/// Returns `J` when `n = 2^J` with `J >= 1`.
pub fn dyadic_level(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Forward transform down to level `j0`.
pub fn dwt(signal: &[f64], bank: &FilterBank, j0: usize) -> Result<WaveletDecomposition> {
    let j = dyadic_level(signal.len())?;
    if j0 >= j {
        return Err(Error::InvalidLevels { j0, j });
    }
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(j - j0);
    for _ in j0..j {
        let (c, d) = analysis_step(&approx, bank);
        details.push(d);
        approx = c;
    }
    details.reverse();
    Ok(WaveletDecomposition {
        j0,
        j,
        scaling: approx,
        details,
    })
}

/// Inverse of [`dwt`] for the same bank.
pub fn idwt(decomp: &WaveletDecomposition, bank: &FilterBank) -> Result<Vec<f64>> {
    let mut approx = decomp.scaling.clone();
    for (i, detail) in decomp.details.iter().enumerate() {
        if detail.len() != approx.len() {
            return Err(Error::ShapeMismatch(format!(
                "detail level {} has {} coefficients, scaling band has {}",
                decomp.j0 + i,
                detail.len(),
                approx.len()
            )));
        }
        approx = synthesis_step(&approx, detail, bank);
    }
    Ok(approx)
}

fn analysis_step(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut c = vec![0.0; half];
    let mut d = vec![0.0; half];
    for k in 0..half {
        let (mut sc, mut sd) = (0.0, 0.0);
        for (tap, (&h, &g)) in bank.lowpass.iter().zip(&bank.highpass).enumerate() {
            let v = x[(2 * k + tap) % n];
            sc += h * v;
            sd += g * v;
        }
        c[k] = sc;
        d[k] = sd;
    }
    (c, d)
}

fn synthesis_step(c: &[f64], d: &[f64], bank: &FilterBank) -> Vec<f64> {
    let n = 2 * c.len();
    let mut x = vec![0.0; n];
    for k in 0..c.len() {
        for (tap, (&h, &g)) in bank.lowpass.iter().zip(&bank.highpass).enumerate() {
            x[(2 * k + tap) % n] += h * c[k] + g * d[k];
        }
    }
    x
}
