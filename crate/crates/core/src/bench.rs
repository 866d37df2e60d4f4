//! Denoising pipeline and the Monte-Carlo AMSE harness.
//!
//! The pipeline is `dwt -> elicit -> shrink -> idwt`. Elicitation takes
//! `sigma` from the MAD of the finest detail band, the per-level bound from
//! [`level_bound`], the per-level prior mass at zero from [`level_epsilon`]
//! and, for the unknown-variance rule, `mu = sigma^2`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elicitation::{
    elicit_mu, estimate_sigma, level_bound, level_epsilon, ElicitationConfig,
};
use crate::error::{invalid, Error, Result};
use crate::shrinkage::{apply_policy, LevelPolicy, ModelIIParams, ModelIParams, Rule};
use crate::signals::{self, derive_seed, NoiseSpec, Signal, SignalName, RNG_ALGORITHM};
use crate::wavelet::{self, dwt, dyadic_level, idwt, FilterBank};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RuleKind {
    ModelI,
    ModelII,
    VisuSoft,
    NoisyIdentity,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [
        RuleKind::ModelI,
        RuleKind::ModelII,
        RuleKind::VisuSoft,
        RuleKind::NoisyIdentity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::ModelI => "model1",
            RuleKind::ModelII => "model2",
            RuleKind::VisuSoft => "visu_soft",
            RuleKind::NoisyIdentity => "noisy_identity",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        match key.as_str() {
            "model1" | "modeli" | "model_i" | "1" | "i" => Ok(RuleKind::ModelI),
            "model2" | "modelii" | "model_ii" | "2" | "ii" => Ok(RuleKind::ModelII),
            "visu_soft" | "visusoft" | "visu" | "visushrink" => Ok(RuleKind::VisuSoft),
            "noisy_identity" | "noisyidentity" | "identity" | "none" => Ok(RuleKind::NoisyIdentity),
            _ => Err(Error::Unknown {
                kind: "rule",
                name: s.to_string(),
            }),
        }
    }
}

impl TryFrom<String> for RuleKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RuleKind> for String {
    fn from(r: RuleKind) -> String {
        r.as_str().to_string()
    }
}

/// Replacement for the elicited per-level bound `m(j)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BoundOverride {
    #[default]
    Elicited,
    Global(f64),
    /// Levels not listed keep their elicited bound.
    PerLevel(BTreeMap<usize, f64>),
}

impl BoundOverride {
    fn resolve(&self, level: usize, elicited: f64) -> f64 {
        match self {
            BoundOverride::Elicited => elicited,
            BoundOverride::Global(m) => *m,
            BoundOverride::PerLevel(map) => map.get(&level).copied().unwrap_or(elicited),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |m: f64| m > 0.0 && m.is_finite();
        let good = match self {
            BoundOverride::Elicited => true,
            BoundOverride::Global(m) => ok(*m),
            BoundOverride::PerLevel(map) => map.values().all(|&m| ok(m)),
        };
        if good {
            Ok(())
        } else {
            Err(invalid("bound overrides must be positive and finite"))
        }
    }
}

/// Accepts `2.5` (every level) or `3=1.2,4=2.0` (per level).
impl FromStr for BoundOverride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = if s.contains('=') {
            let mut map = BTreeMap::new();
            for part in s.split(',') {
                let (j, m) = part
                    .split_once('=')
                    .ok_or_else(|| invalid(format!("malformed bound override `{part}`")))?;
                let j: usize = j
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad level `{j}` in bound override")))?;
                let m: f64 = m
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad bound `{m}` in bound override")))?;
                map.insert(j, m);
            }
            BoundOverride::PerLevel(map)
        } else {
            BoundOverride::Global(
                s.parse()
                    .map_err(|_| invalid(format!("bad bound override `{s}`")))?,
            )
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseOptions {
    pub elicitation: ElicitationConfig,
    pub j0: usize,
    /// Skips the MAD estimate when set.
    pub sigma: Option<f64>,
    pub bound: BoundOverride,
}

impl Default for DenoiseOptions {
    fn default() -> Self {
        Self {
            elicitation: ElicitationConfig::default(),
            j0: 3,
            sigma: None,
            bound: BoundOverride::Elicited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub m: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub estimate: Vec<f64>,
    pub sigma_hat: f64,
    /// The MAD estimate was zero and a floor was used instead.
    pub sigma_floored: bool,
    /// Empty for the threshold and identity rules.
    pub levels: Vec<LevelDiagnostics>,
}

fn noise_scale(y: &[f64], finest: &[f64], opts: &DenoiseOptions) -> Result<(f64, bool)> {
    let sigma = match opts.sigma {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(invalid(format!("sigma override must be positive, got {s}"))),
        None => estimate_sigma(finest)?,
    };
    if sigma > 0.0 {
        return Ok((sigma, false));
    }
    let max_abs = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-12 * max_abs.max(1.0);
    warn!("finest detail band has zero spread; using sigma = {floor:e}");
    Ok((floor, true))
}

/// Denoises `y` (length `2^J`, `J > j0`) with one rule of the comparison set.
pub fn denoise(y: &[f64], rule: RuleKind, bank: &FilterBank, opts: &DenoiseOptions) -> Result<Denoised> {
    opts.elicitation.validate()?;
    opts.bound.validate()?;
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(invalid(format!("observation {i} is not finite")));
    }
    let decomp = dwt(y, bank, opts.j0)?;
    let (sigma_hat, sigma_floored) = noise_scale(y, decomp.finest_detail(), opts)?;

    if rule == RuleKind::NoisyIdentity {
        return Ok(Denoised {
            estimate: y.to_vec(),
            sigma_hat,
            sigma_floored,
            levels: Vec::new(),
        });
    }
    if rule == RuleKind::VisuSoft {
        let lambda = universal_threshold(sigma_hat, y.len());
        let mut out = decomp;
        for level in out.levels() {
            out.detail_mut(level)
                .expect("level in range")
                .iter_mut()
                .for_each(|d| *d = soft_threshold(*d, lambda));
        }
        return Ok(Denoised {
            estimate: idwt(&out, bank)?,
            sigma_hat,
            sigma_floored,
            levels: Vec::new(),
        });
    }

    let finest = decomp.finest_level();
    let max_abs_y = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mu = elicit_mu(sigma_hat);
    let mut policy = LevelPolicy::new(sigma_hat)?;
    let mut levels = Vec::with_capacity(finest - opts.j0);
    for level in decomp.levels() {
        let elicited = level_bound(sigma_hat, max_abs_y, finest, level)?;
        // An all-zero input has a zero bound; the smallest positive bound
        // gives the same all-zero shrinkage without a degenerate prior.
        let m = opts.bound.resolve(level, elicited).max(f64::MIN_POSITIVE);
        let eps = level_epsilon(level, opts.j0, &opts.elicitation)?;
        let r = if rule == RuleKind::ModelI {
            Rule::ModelI(ModelIParams::new(eps, m)?)
        } else {
            Rule::ModelII(ModelIIParams::new(eps, m, mu)?)
        };
        policy.insert(level, r);
        levels.push(LevelDiagnostics { level, m, eps });
    }
    let shrunk = apply_policy(&decomp, &policy)?;
    Ok(Denoised {
        estimate: idwt(&shrunk, bank)?,
        sigma_hat,
        sigma_floored,
        levels,
    })
}

/// `sigma * sqrt(2 ln n)`.
pub fn universal_threshold(sigma: f64, n: usize) -> f64 {
    sigma * (2.0 * (n as f64).ln()).sqrt()
}

pub fn soft_threshold(d: f64, lambda: f64) -> f64 {
    d.signum() * (d.abs() - lambda).max(0.0)
}

/// Global soft thresholding of all detail levels at the universal threshold.
pub fn visu_shrink(y: &[f64], bank: &FilterBank, j0: usize) -> Result<Vec<f64>> {
    let opts = DenoiseOptions {
        j0,
        ..DenoiseOptions::default()
    };
    Ok(denoise(y, RuleKind::VisuSoft, bank, &opts)?.estimate)
}

/// Mean squared error with the `1/n` normalization.
pub fn mse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: estimate.len(),
        });
    }
    let ss: f64 = truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(ss / truth.len() as f64)
}

/// `(1 / (n N)) sum_j sum_i (f_i - fhat_ji)^2`.
pub fn amse<E: AsRef<[f64]>>(truth: &[f64], estimates: &[E]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for e in estimates {
        total += mse(truth, e.as_ref())?;
    }
    Ok(total / estimates.len() as f64)
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Haar for blocks, Daubechies-6 for bumps, Symmlet-8 for everything else.
pub fn default_bank(signal: SignalName) -> &'static str {
    match signal {
        SignalName::Blocks => "haar",
        SignalName::Bumps => "daub6",
        _ => "symmlet8",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub signals: Vec<SignalName>,
    pub n: usize,
    pub snr: Vec<f64>,
    pub replications: usize,
    pub rules: Vec<RuleKind>,
    pub l: f64,
    pub k: f64,
    pub j0: usize,
    pub seed: u64,
    /// Noise standard deviation; signals are rescaled to `snr * sigma`.
    pub sigma: f64,
    pub bank_overrides: BTreeMap<SignalName, String>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            signals: vec![SignalName::HeaviSine, SignalName::Wave],
            n: 1024,
            snr: vec![0.2],
            replications: 20,
            rules: RuleKind::ALL.to_vec(),
            l: 6.0,
            k: 2.5,
            j0: 3,
            seed: 12345,
            sigma: 1.0,
            bank_overrides: BTreeMap::new(),
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`from_json`](Self::from_json), with `seed` used only when the
    /// document has no `seed` key.
    pub fn from_json_with_seed(text: &str, seed: u64) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(obj) = value.as_object_mut() {
            obj.entry("seed").or_insert(seed.into());
        }
        let cfg: Self = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let j = dyadic_level(self.n)?;
        if self.j0 >= j {
            return Err(Error::InvalidLevels { j0: self.j0, j });
        }
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if self.signals.is_empty() || self.snr.is_empty() || self.rules.is_empty() {
            return Err(invalid("signals, snr and rules must be nonempty"));
        }
        if let Some(s) = self.snr.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(invalid(format!("snr values must be positive, got {s}")));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        ElicitationConfig::new(self.l, self.k)?;
        for signal in &self.signals {
            self.bank_for(*signal)?;
        }
        Ok(())
    }

    pub fn bank_for(&self, signal: SignalName) -> Result<FilterBank> {
        let name = self
            .bank_overrides
            .get(&signal)
            .map(String::as_str)
            .unwrap_or_else(|| default_bank(signal));
        wavelet::filter(name)
    }

    /// Noise seed of one replication. Depends only on the master seed, the
    /// signal, the SNR and the replication index, so every rule sees the same
    /// noisy data and reordering the config does not change any cell.
    pub fn replication_seed(&self, signal: SignalName, snr: f64, replication: usize) -> u64 {
        let tag = SignalName::ALL.iter().position(|s| *s == signal).unwrap_or(0) as u64;
        let cell = derive_seed(derive_seed(self.seed, tag), snr.to_bits());
        derive_seed(cell, replication as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub signal: SignalName,
    pub snr: f64,
    pub rule: RuleKind,
    pub mses: Vec<f64>,
    pub amse: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl CellSummary {
    fn new(signal: SignalName, snr: f64, rule: RuleKind, mses: Vec<f64>) -> Self {
        let amse = mses.iter().sum::<f64>() / mses.len() as f64;
        let mut sorted = mses.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        Self {
            signal,
            snr,
            rule,
            amse,
            q25: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q75: quantile(&sorted, 0.75),
            mses,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub cells: Vec<CellSummary>,
}

impl SimulationReport {
    pub fn cell(&self, signal: SignalName, snr: f64, rule: RuleKind) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.signal == signal && c.snr == snr && c.rule == rule)
    }

    /// `signal,snr,rule,replication,mse`
    pub fn write_replications_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "signal,snr,rule,replication,mse")?;
        for c in &self.cells {
            for (r, m) in c.mses.iter().enumerate() {
                writeln!(w, "{},{:.16e},{},{},{:.16e}", c.signal, c.snr, c.rule, r, m)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `signal,snr,rule,amse,q25,median,q75`
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "signal,snr,rule,amse,q25,median,q75")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                c.signal, c.snr, c.rule, c.amse, c.q25, c.median, c.q75
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every (signal, snr, rule) cell over `replications` noisy copies.
///
/// Replications run in parallel; results are gathered in index order, so the
/// report does not depend on the number of workers.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    log::debug!("noise generator: {RNG_ALGORITHM}");
    let opts = DenoiseOptions {
        elicitation: ElicitationConfig::new(cfg.l, cfg.k)?,
        j0: cfg.j0,
        ..DenoiseOptions::default()
    };

    let mut cells = Vec::new();
    for &signal in &cfg.signals {
        let bank = cfg.bank_for(signal)?;
        let base = signals::generate(signal, cfg.n)?;
        for &snr in &cfg.snr {
            let clean = signals::rescale_to_snr(&base, snr, cfg.sigma)?;
            let per_rep: Vec<Vec<f64>> = (0..cfg.replications)
                .into_par_iter()
                .map(|r| replicate(cfg, &opts, &bank, signal, snr, &clean, r))
                .collect::<Result<_>>()?;
            for (i, &rule) in cfg.rules.iter().enumerate() {
                let mses = per_rep.iter().map(|row| row[i]).collect();
                cells.push(CellSummary::new(signal, snr, rule, mses));
            }
        }
    }
    Ok(SimulationReport { cells })
}

fn replicate(
    cfg: &SimulationConfig,
    opts: &DenoiseOptions,
    bank: &FilterBank,
    signal: SignalName,
    snr: f64,
    clean: &Signal,
    replication: usize,
) -> Result<Vec<f64>> {
    let seed = cfg.replication_seed(signal, snr, replication);
    let noisy = signals::add_noise(clean, &NoiseSpec::new(cfg.sigma, seed)?);
    cfg.rules
        .iter()
        .map(|&rule| {
            let est = denoise(noisy.samples(), rule, bank, opts)?;
            mse(clean.samples(), &est.estimate)
        })
        .collect()
}
