//! Gamma-minimax shrinkage rules, Bayes with respect to the three-point prior
//! `eps * delta_0 + (1 - eps) / 2 * (delta_{-m} + delta_m)`.
//!
//! Both rules are evaluated in a form that only ever exponentiates
//! non-positive arguments (or returns the zero limit), so they stay finite for
//! any finite input even when `m^2 / 2` or `m |d|` are far beyond the range of
//! `f64::exp`.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::wavelet::WaveletDecomposition;

/// Parameters of the known-variance rule. `m` is in standardized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelIParams {
    eps: f64,
    m: f64,
}

impl ModelIParams {
    pub fn new(eps: f64, m: f64) -> Result<Self> {
        check_eps_m(eps, m)?;
        Ok(Self { eps, m })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// Parameters of the exponential-variance-prior rule; `mu` is the prior mean
/// of the noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelIIParams {
    eps: f64,
    m: f64,
    mu: f64,
}

impl ModelIIParams {
    pub fn new(eps: f64, m: f64, mu: f64) -> Result<Self> {
        check_eps_m(eps, m)?;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { eps, m, mu })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Rate of the double-exponential marginal, `sqrt(2 / mu)`.
    pub fn lambda(&self) -> f64 {
        (2.0 / self.mu).sqrt()
    }
}

fn check_eps_m(eps: f64, m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid(format!("eps must lie in [0, 1], got {eps}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid(format!("m must be positive, got {m}")));
    }
    Ok(())
}

/// `ln(eps / (1 - eps))`; `-inf` at `eps = 0`.
fn log_odds(eps: f64) -> f64 {
    eps.ln() - (-eps).ln_1p()
}

/// `sinh(a) / (cosh(a) + e^{tail + a})` rewritten as
/// `(1 - e^{-2a}) / (1 + e^{-2a} + 2 e^{tail})`, valid for `a >= 0`.
#[inline]
fn bounded_ratio(a: f64, tail: f64) -> f64 {
    let e2 = (-2.0 * a).exp();
    let num = -(-2.0 * a).exp_m1();
    let t = tail.exp();
    if t.is_infinite() {
        return 0.0;
    }
    num / (1.0 + e2 + 2.0 * t)
}

/// Gamma-minimax rule for `d ~ N(theta, 1)`:
/// `m sinh(m d) / (cosh(m d) + eps / (1 - eps) * e^{m^2 / 2})`.
pub fn rule_model1(d: f64, p: &ModelIParams) -> f64 {
    if p.eps >= 1.0 || d == 0.0 {
        return 0.0;
    }
    let m = p.m;
    let a = m * d.abs();
    // Dividing through by e^a / 2 leaves 2 K e^{m^2/2 - a} in the denominator.
    let tail = log_odds(p.eps) + 0.5 * m * m - a;
    d.signum() * m * bounded_ratio(a, tail)
}

/// Gamma-minimax rule for the double-exponential marginal with rate
/// `lambda = sqrt(2 / mu)`.
///
/// Inside `[-m, m]` the rule is `m sinh(lambda d) / (cosh(lambda d) + K e^{lambda (m - |d|)})`
/// and outside it is the constant `m sinh(lambda m) / (cosh(lambda m) + K)`,
/// with `K = eps / (1 - eps)`.
pub fn rule_model2(d: f64, p: &ModelIIParams) -> f64 {
    if p.eps >= 1.0 || d == 0.0 {
        return 0.0;
    }
    let lambda = p.lambda();
    let a = lambda * d.abs().min(p.m);
    let tail = log_odds(p.eps) + lambda * p.m - 2.0 * a;
    d.signum() * p.m * bounded_ratio(a, tail)
}

/// One of the two Gamma-minimax rules together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    ModelI(ModelIParams),
    ModelII(ModelIIParams),
}

impl Rule {
    pub fn shrink(&self, d: f64) -> f64 {
        match self {
            Rule::ModelI(p) => rule_model1(d, p),
            Rule::ModelII(p) => rule_model2(d, p),
        }
    }

    pub fn eps(&self) -> f64 {
        match self {
            Rule::ModelI(p) => p.eps,
            Rule::ModelII(p) => p.eps,
        }
    }

    pub fn m(&self) -> f64 {
        match self {
            Rule::ModelI(p) => p.m,
            Rule::ModelII(p) => p.m,
        }
    }

    /// Points where the rule is not differentiable.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Rule::ModelI(_) => Vec::new(),
            Rule::ModelII(p) => vec![-p.m, 0.0, p.m],
        }
    }
}

/// Level-by-level rule assignment and the noise scale used to standardize
/// coefficients for the known-variance rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPolicy {
    sigma: f64,
    rules: BTreeMap<usize, Rule>,
}

impl LevelPolicy {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!(
                "standardization scale must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            rules: BTreeMap::new(),
        })
    }

    pub fn with_level(mut self, level: usize, rule: Rule) -> Self {
        self.rules.insert(level, rule);
        self
    }

    pub fn insert(&mut self, level: usize, rule: Rule) {
        self.rules.insert(level, rule);
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rule(&self, level: usize) -> Option<&Rule> {
        self.rules.get(&level)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().map(|(&j, r)| (j, r))
    }
}

/// Shrinks every detail coefficient with its level's rule. Scaling
/// coefficients pass through untouched.
pub fn apply_policy(
    decomp: &WaveletDecomposition,
    policy: &LevelPolicy,
) -> Result<WaveletDecomposition> {
    let mut out = decomp.clone();
    for level in decomp.levels() {
        let rule = policy.rule(level).ok_or(Error::UncoveredLevel(level))?;
        let band = out.detail_mut(level).expect("level in range");
        match rule {
            Rule::ModelI(p) => {
                let s = policy.sigma;
                band.iter_mut()
                    .for_each(|d| *d = s * rule_model1(*d / s, p));
            }
            Rule::ModelII(p) => band.iter_mut().for_each(|d| *d = rule_model2(*d, p)),
        }
    }
    Ok(out)
}
