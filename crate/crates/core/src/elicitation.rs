//! Empirical-Bayes choice of the hyper-parameters `sigma`, `m(j)`, `eps(j)`
//! and `mu` from the observed data.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Normal-consistency constant of the median absolute deviation.
pub const MAD_SCALE: f64 = 0.6745;

/// Shape constants of the level-dependent prior weight at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElicitationConfig {
    pub l: f64,
    pub k: f64,
}

impl Default for ElicitationConfig {
    fn default() -> Self {
        Self { l: 6.0, k: 2.5 }
    }
}

impl ElicitationConfig {
    pub fn new(l: f64, k: f64) -> Result<Self> {
        let cfg = Self { l, k };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) || !(self.k > 0.0 && self.k.is_finite()) {
            return Err(invalid(format!(
                "l and k must be positive, got l = {}, k = {}",
                self.l, self.k
            )));
        }
        Ok(())
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Robust noise level from the finest detail band:
/// `median(|d - median(d)|) / 0.6745`.
pub fn estimate_sigma(finest_details: &[f64]) -> Result<f64> {
    if finest_details.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut buf = finest_details.to_vec();
    let center = median(&mut buf);
    buf.iter_mut().for_each(|v| *v = (*v - center).abs());
    Ok(median(&mut buf) / MAD_SCALE)
}

/// Bound on the signal part of level-`j` coefficients,
/// `sigma * max|y| * sqrt(2)^(J - j)`.
pub fn level_bound(sigma_hat: f64, max_abs_y: f64, finest: usize, level: usize) -> Result<f64> {
    if level >= finest {
        return Err(invalid(format!(
            "level {level} must be below the finest level {finest}"
        )));
    }
    if sigma_hat < 0.0 || max_abs_y < 0.0 {
        return Err(invalid("sigma and max|y| must be nonnegative"));
    }
    let steps = (finest - level) as i32;
    Ok(sigma_hat * max_abs_y * std::f64::consts::SQRT_2.powi(steps))
}

/// Prior mass at zero for level `j`: `1 - 1 / (j - j0 + l)^k`.
pub fn level_epsilon(level: usize, j0: usize, cfg: &ElicitationConfig) -> Result<f64> {
    if level < j0 {
        return Err(invalid(format!(
            "level {level} is coarser than the coarsest level {j0}"
        )));
    }
    cfg.validate()?;
    let base = (level - j0) as f64 + cfg.l;
    Ok(1.0 - base.powf(cfg.k).recip())
}

/// Prior mean of the noise variance by moment matching.
pub fn elicit_mu(sigma_hat: f64) -> f64 {
    sigma_hat * sigma_hat
}
