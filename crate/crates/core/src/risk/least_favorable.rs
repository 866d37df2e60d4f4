//! Least-favorability of the three-point prior, the shape of the risk of its
//! Bayes rule, and the largest bound `m*` for which the prior stays least
//! favorable.
//!
//! With `Gamma = {eps delta_0 + (1 - eps) xi}` and `xi` free on `[-m, m]`, the
//! worst Bayes risk of a rule is `eps R(0) + (1 - eps) sup_theta R(theta)`.
//! The rule built from the three-point prior is therefore Gamma-minimax
//! exactly when `R(m) = max_{|theta| <= m} R(theta)`. This one check covers the
//! W case (`R(0) <= R(m)`), the VVV case (`R(m1) <= R(m)`) and the V case
//! (`R` still rising at the endpoint).

use std::fmt;
use std::str::FromStr;

use super::{Model, RiskSettings};
use crate::error::{Error, Result};

/// Qualitative shape of `theta -> R(theta)` on `[-m, m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiskShape {
    /// Peaks at `0` and `+-m`.
    W,
    /// Minimum at `0`, interior peaks at `+-m1`, dips, then peaks at `+-m`.
    VVV,
    /// Minimum at `0`, rising to the endpoints.
    V,
}

impl fmt::Display for RiskShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskShape::W => "W",
            RiskShape::VVV => "VVV",
            RiskShape::V => "V",
        })
    }
}

impl FromStr for RiskShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W" => Ok(RiskShape::W),
            "VVV" => Ok(RiskShape::VVV),
            "V" => Ok(RiskShape::V),
            other => Err(Error::Unknown {
                kind: "risk shape",
                name: other.to_string(),
            }),
        }
    }
}

/// Bracket and resolution of the `m*` bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstarOptions {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Default for MstarOptions {
    fn default() -> Self {
        Self {
            lo: 0.1,
            hi: 6.0,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    Up,
    Down,
}

/// Monotone runs of `values`, ignoring reversals smaller than `floor`.
fn monotone_runs(values: &[f64], floor: f64) -> Vec<Trend> {
    let mut runs = Vec::new();
    let mut trend: Option<Trend> = None;
    let pivot = values[0];
    let mut extreme = values[0];
    for &v in &values[1..] {
        match trend {
            None => {
                if v > pivot + floor {
                    trend = Some(Trend::Up);
                    extreme = v;
                } else if v < pivot - floor {
                    trend = Some(Trend::Down);
                    extreme = v;
                }
            }
            Some(Trend::Up) => {
                if v >= extreme {
                    extreme = v;
                } else if extreme - v > floor {
                    runs.push(Trend::Up);
                    trend = Some(Trend::Down);
                    extreme = v;
                }
            }
            Some(Trend::Down) => {
                if v <= extreme {
                    extreme = v;
                } else if v - extreme > floor {
                    runs.push(Trend::Down);
                    trend = Some(Trend::Up);
                    extreme = v;
                }
            }
        }
    }
    if let Some(t) = trend {
        runs.push(t);
    }
    runs
}

fn classify(runs: &[Trend]) -> Option<RiskShape> {
    use Trend::*;
    // A final descent only says the endpoint is no longer the maximum; the
    // shape is read from what precedes it.
    let body = match runs {
        [rest @ .., Down] if !rest.is_empty() => rest,
        _ => runs,
    };
    match body {
        [Down, Up] => Some(RiskShape::W),
        [Up, Down, Up] => Some(RiskShape::VVV),
        [Up] => Some(RiskShape::V),
        _ => None,
    }
}

impl RiskSettings {
    fn half_grid(&self, m: f64) -> Vec<f64> {
        let n = self.grid_points.max(3);
        let step = m / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { m } else { step * i as f64 })
            .collect()
    }

    /// Golden-section search for the largest risk on `[a, b]`.
    fn refine_peak<F: Fn(f64) -> Result<f64>>(&self, risk: &F, a: f64, b: f64) -> Result<f64> {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let (mut a, mut b) = (a, b);
        let tol = 1e-7 * b.abs().max(1.0);
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let mut f1 = risk(x1)?;
        let mut f2 = risk(x2)?;
        let mut best = f1.max(f2);
        while b - a > tol {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INV_PHI * (b - a);
                f1 = risk(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INV_PHI * (b - a);
                f2 = risk(x2)?;
            }
            best = best.max(f1).max(f2);
        }
        Ok(best)
    }

    /// Whether the three-point prior on `{0, +-m}` is least favorable for
    /// its own Bayes rule: no `theta` in `[0, m]` has risk above `R(m)` by
    /// more than `lf_slack`.
    pub fn is_least_favorable(&self, eps: f64, m: f64, model: Model) -> Result<bool> {
        let rule = model.rule(eps, m)?;
        let like = model.likelihood();
        let thetas = self.half_grid(m);
        let risks = self.risk_curve(&rule, &like, &thetas)?;
        let last = risks.len() - 1;
        let at_m = risks[last];
        let risk = |t: f64| self.frequentist_risk(t, &rule, &like);

        let mut peak = risks[..last].iter().copied().fold(f64::MIN, f64::max);
        if peak > at_m + self.lf_slack {
            return Ok(false);
        }
        for i in 1..last {
            if risks[i] >= risks[i - 1] && risks[i] >= risks[i + 1] {
                peak = peak.max(self.refine_peak(&risk, thetas[i - 1], thetas[i + 1])?);
            }
        }
        peak = peak.max(self.refine_peak(&risk, thetas[last - 1], m)?);
        Ok(peak <= at_m + self.lf_slack)
    }

    /// Classifies the risk of the model's own rule at `(eps, m)`.
    pub fn risk_shape(&self, eps: f64, m: f64, model: Model) -> Result<RiskShape> {
        let rule = model.rule(eps, m)?;
        let like = model.likelihood();
        let thetas = self.half_grid(m);
        let risks = self.risk_curve(&rule, &like, &thetas)?;
        let runs = monotone_runs(&risks, self.prominence);
        classify(&runs).ok_or_else(|| Error::AmbiguousShape {
            eps,
            m,
            detail: format!("monotone runs on [0, m]: {runs:?}"),
        })
    }

    /// Bisection for the largest `m` at which the three-point prior is least
    /// favorable.
    pub fn mstar(&self, eps: f64, model: Model, opts: &MstarOptions) -> Result<f64> {
        if !(0.0..1.0).contains(&eps) {
            return Err(crate::error::invalid(format!(
                "eps must lie in [0, 1) for m*, got {eps}"
            )));
        }
        let (mut lo, mut hi) = (opts.lo, opts.hi);
        let bracket = Error::Bracket { eps, lo, hi };
        if !self.is_least_favorable(eps, lo, model)? || self.is_least_favorable(eps, hi, model)? {
            return Err(bracket);
        }
        while hi - lo > opts.tol {
            let mid = 0.5 * (lo + hi);
            if self.is_least_favorable(eps, mid, model)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
