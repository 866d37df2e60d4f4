//! Frequentist risk of shrinkage rules under squared-error loss, its
//! bias/variance decomposition, Bayes risk under the three-point prior, and
//! the least-favorability machinery that locates `m*`.

mod least_favorable;
pub mod quadrature;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::shrinkage::{ModelIIParams, ModelIParams, Rule};

pub use least_favorable::{MstarOptions, RiskShape};
pub use quadrature::QuadratureOptions;

/// Prior mean of the noise variance that reproduces the published `m*`
/// column for the double-exponential model (`1 / sqrt 2`).
pub const TABLE_MU: f64 = std::f64::consts::FRAC_1_SQRT_2;

const NORMAL_HALF_WIDTH: f64 = 10.0;
const DE_HALF_WIDTH_SCALES: f64 = 40.0;

/// Any estimator of a location parameter from one observation.
pub trait Estimator: Sync {
    fn estimate(&self, d: f64) -> f64;

    /// Points where `estimate` is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Estimator for Rule {
    fn estimate(&self, d: f64) -> f64 {
        self.shrink(d)
    }

    fn kinks(&self) -> Vec<f64> {
        Rule::kinks(self)
    }
}

/// `delta(d) = d`.
#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl Estimator for Identity {
    fn estimate(&self, d: f64) -> f64 {
        d
    }
}

/// `delta(d) = c` regardless of the data.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl Estimator for Constant {
    fn estimate(&self, _d: f64) -> f64 {
        self.0
    }
}

/// Sampling distribution of one coefficient given its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Likelihood {
    /// `d | theta ~ N(theta, 1)`.
    NormalUnit,
    /// `d | theta ~ DE(theta, sqrt(mu / 2))`, the exponential scale mixture of normals.
    DoubleExp { mu: f64 },
}

impl Likelihood {
    pub fn double_exp(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        Ok(Likelihood::DoubleExp { mu })
    }

    pub fn density(&self, d: f64, theta: f64) -> f64 {
        match *self {
            Likelihood::NormalUnit => {
                let z = d - theta;
                (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
            }
            Likelihood::DoubleExp { mu } => {
                let b = (0.5 * mu).sqrt();
                (-(d - theta).abs() / b).exp() / (2.0 * b)
            }
        }
    }

    /// Variance of `d` given `theta`.
    pub fn variance(&self) -> f64 {
        match *self {
            Likelihood::NormalUnit => 1.0,
            Likelihood::DoubleExp { mu } => mu,
        }
    }

    fn window(&self, theta: f64) -> (f64, f64) {
        let half = match *self {
            Likelihood::NormalUnit => NORMAL_HALF_WIDTH,
            Likelihood::DoubleExp { mu } => DE_HALF_WIDTH_SCALES * (0.5 * mu).sqrt(),
        };
        (theta - half, theta + half)
    }
}

/// A Gamma-minimax rule family together with its likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Known unit noise variance, normal likelihood.
    I,
    /// Exponential prior with mean `mu` on the noise variance.
    II { mu: f64 },
}

impl Model {
    /// Model II at the variance scale behind the published tables.
    pub fn table_ii() -> Self {
        Model::II { mu: TABLE_MU }
    }

    /// The model's own Gamma-minimax rule at `(eps, m)`.
    pub fn rule(&self, eps: f64, m: f64) -> Result<Rule> {
        Ok(match *self {
            Model::I => Rule::ModelI(ModelIParams::new(eps, m)?),
            Model::II { mu } => Rule::ModelII(ModelIIParams::new(eps, m, mu)?),
        })
    }

    pub fn likelihood(&self) -> Likelihood {
        match *self {
            Model::I => Likelihood::NormalUnit,
            Model::II { mu } => Likelihood::DoubleExp { mu },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Model::I => "I",
            Model::II { .. } => "II",
        }
    }
}

/// Numerical settings shared by every risk computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSettings {
    pub quadrature: QuadratureOptions,
    /// Points on `[0, m]` used for least-favorability and shape checks.
    pub grid_points: usize,
    /// Smallest rise or fall that counts as a genuine extremum.
    pub prominence: f64,
    /// Allowed excess of an interior risk value over `R(m)`.
    pub lf_slack: f64,
}

impl Default for RiskSettings {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            grid_points: 2001,
            prominence: 1e-9,
            lf_slack: 1e-6,
        }
    }
}

/// Risk, bias and variance of an estimator at one `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPoint {
    pub theta: f64,
    pub risk: f64,
    pub bias_sq: f64,
    pub variance: f64,
}

impl RiskSettings {
    fn breaks<E: Estimator + ?Sized>(&self, theta: f64, rule: &E, like: &Likelihood) -> Vec<f64> {
        let mut pts = rule.kinks();
        if let Likelihood::DoubleExp { .. } = like {
            pts.push(theta);
        }
        pts
    }

    fn expect<E, G>(&self, theta: f64, rule: &E, like: &Likelihood, g: G) -> Result<f64>
    where
        E: Estimator + ?Sized,
        G: Fn(f64) -> f64,
    {
        let (lo, hi) = like.window(theta);
        let breaks = self.breaks(theta, rule, like);
        let est = quadrature::integrate(
            |d| g(rule.estimate(d)) * like.density(d, theta),
            lo,
            hi,
            &breaks,
            &self.quadrature,
        )?;
        Ok(est.value)
    }

    /// `E[(delta(d) - theta)^2 | theta]`.
    pub fn frequentist_risk<E: Estimator + ?Sized>(
        &self,
        theta: f64,
        rule: &E,
        like: &Likelihood,
    ) -> Result<f64> {
        self.expect(theta, rule, like, |v| (v - theta) * (v - theta))
    }

    /// `((theta - E delta)^2, E (delta - E delta)^2)`.
    pub fn bias_variance<E: Estimator + ?Sized>(
        &self,
        theta: f64,
        rule: &E,
        like: &Likelihood,
    ) -> Result<(f64, f64)> {
        let mean = self.expect(theta, rule, like, |v| v)?;
        let var = self.expect(theta, rule, like, |v| (v - mean) * (v - mean))?;
        Ok(((theta - mean) * (theta - mean), var))
    }

    pub fn risk_point<E: Estimator + ?Sized>(
        &self,
        theta: f64,
        rule: &E,
        like: &Likelihood,
    ) -> Result<RiskPoint> {
        let risk = self.frequentist_risk(theta, rule, like)?;
        let (bias_sq, variance) = self.bias_variance(theta, rule, like)?;
        Ok(RiskPoint {
            theta,
            risk,
            bias_sq,
            variance,
        })
    }

    /// Bayes risk under `eps delta_0 + (1 - eps) / 2 (delta_{-m} + delta_m)`.
    pub fn bayes_risk<E: Estimator + ?Sized>(
        &self,
        eps: f64,
        m: f64,
        rule: &E,
        like: &Likelihood,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(invalid(format!("eps must lie in [0, 1], got {eps}")));
        }
        let r0 = self.frequentist_risk(0.0, rule, like)?;
        let rp = self.frequentist_risk(m, rule, like)?;
        let rn = self.frequentist_risk(-m, rule, like)?;
        Ok(eps * r0 + 0.5 * (1.0 - eps) * (rn + rp))
    }

    /// Risk of the model's rule at each `theta`, evaluated in parallel.
    pub fn risk_curve(&self, rule: &Rule, like: &Likelihood, thetas: &[f64]) -> Result<Vec<f64>> {
        thetas
            .par_iter()
            .map(|&t| self.frequentist_risk(t, rule, like))
            .collect()
    }

    /// Risk, bias and variance over `grid_size` equispaced points on `[-m, m]`.
    pub fn risk_profile(
        &self,
        eps: f64,
        m: f64,
        model: Model,
        grid_size: usize,
    ) -> Result<RiskProfile> {
        if grid_size < 2 {
            return Err(invalid("risk profile needs at least two grid points"));
        }
        let rule = model.rule(eps, m)?;
        let like = model.likelihood();
        let step = 2.0 * m / (grid_size - 1) as f64;
        let thetas: Vec<f64> = (0..grid_size)
            .map(|i| if i == grid_size - 1 { m } else { -m + step * i as f64 })
            .collect();
        let points: Vec<RiskPoint> = thetas
            .par_iter()
            .map(|&t| self.risk_point(t, &rule, &like))
            .collect::<Result<_>>()?;
        let shape = match self.risk_shape(eps, m, model) {
            Ok(shape) => Some(shape),
            Err(Error::AmbiguousShape { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(RiskProfile {
            eps,
            m,
            model,
            thetas,
            risk: points.iter().map(|p| p.risk).collect(),
            bias_sq: points.iter().map(|p| p.bias_sq).collect(),
            variance: points.iter().map(|p| p.variance).collect(),
            shape,
        })
    }
}

/// Sampled risk decomposition of a model's rule over `[-m, m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub eps: f64,
    pub m: f64,
    pub model: Model,
    pub thetas: Vec<f64>,
    pub risk: Vec<f64>,
    pub bias_sq: Vec<f64>,
    pub variance: Vec<f64>,
    /// `None` when the curve matches none of the three shapes, which happens
    /// well above `m*`.
    pub shape: Option<RiskShape>,
}

impl RiskProfile {
    /// Largest `|risk - (bias^2 + variance)|` over the grid.
    pub fn decomposition_gap(&self) -> f64 {
        self.risk
            .iter()
            .zip(&self.bias_sq)
            .zip(&self.variance)
            .map(|((r, b), v)| (r - b - v).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `theta,risk,bias_sq,variance` rows with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "theta,risk,bias_sq,variance")?;
        for i in 0..self.thetas.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.thetas[i], self.risk[i], self.bias_sq[i], self.variance[i]
            )?;
        }
        Ok(())
    }
}

pub fn frequentist_risk<E: Estimator + ?Sized>(
    theta: f64,
    rule: &E,
    like: &Likelihood,
) -> Result<f64> {
    RiskSettings::default().frequentist_risk(theta, rule, like)
}

pub fn bias_variance<E: Estimator + ?Sized>(
    theta: f64,
    rule: &E,
    like: &Likelihood,
) -> Result<(f64, f64)> {
    RiskSettings::default().bias_variance(theta, rule, like)
}

pub fn bayes_risk<E: Estimator + ?Sized>(
    eps: f64,
    m: f64,
    rule: &E,
    like: &Likelihood,
) -> Result<f64> {
    RiskSettings::default().bayes_risk(eps, m, rule, like)
}

pub fn risk_shape(eps: f64, m: f64, model: Model) -> Result<RiskShape> {
    RiskSettings::default().risk_shape(eps, m, model)
}

pub fn is_least_favorable(eps: f64, m: f64, model: Model) -> Result<bool> {
    RiskSettings::default().is_least_favorable(eps, m, model)
}

pub fn mstar(eps: f64, model: Model) -> Result<f64> {
    RiskSettings::default().mstar(eps, model, &MstarOptions::default())
}

pub fn risk_profile(eps: f64, m: f64, model: Model, grid_size: usize) -> Result<RiskProfile> {
    RiskSettings::default().risk_profile(eps, m, model, grid_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degenerate_estimators() {
        let s = RiskSettings::default();
        for like in [Likelihood::NormalUnit, Likelihood::DoubleExp { mu: 2.0 }] {
            for theta in [-1.5, 0.0, 0.5, 2.0] {
                let c = Constant(0.3);
                let r = s.frequentist_risk(theta, &c, &like).unwrap();
                let (b, v) = s.bias_variance(theta, &c, &like).unwrap();
                assert_abs_diff_eq!(r, (0.3 - theta) * (0.3 - theta), epsilon = 1e-12);
                assert_abs_diff_eq!(b, r, epsilon = 1e-12);
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);

                let r = s.frequentist_risk(theta, &Identity, &like).unwrap();
                assert_abs_diff_eq!(r, like.variance(), epsilon = 1e-10);
            }
        }
        let (b, v) = s.bias_variance(0.5, &Constant(0.0), &Likelihood::NormalUnit).unwrap();
        assert_abs_diff_eq!(b, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        let (b, v) = s.bias_variance(1.7, &Identity, &Likelihood::NormalUnit).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bayes_risk_limits() {
        let s = RiskSettings::default();
        let rule = Model::I.rule(0.5, 1.0).unwrap();
        let like = Likelihood::NormalUnit;
        let r0 = s.frequentist_risk(0.0, &rule, &like).unwrap();
        let rm = s.frequentist_risk(1.0, &rule, &like).unwrap();
        assert_abs_diff_eq!(s.bayes_risk(1.0, 1.0, &rule, &like).unwrap(), r0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.bayes_risk(0.0, 1.0, &rule, &like).unwrap(), rm, epsilon = 1e-12);
        let mixed = s.bayes_risk(0.5, 1.0, &rule, &like).unwrap();
        assert_abs_diff_eq!(mixed, 0.5 * r0 + 0.5 * rm, epsilon = 1e-12);
        assert!(s.bayes_risk(1.5, 1.0, &rule, &like).is_err());
    }

    #[test]
    fn likelihood_validation() {
        assert!(Likelihood::double_exp(0.0).is_err());
        assert_eq!(Likelihood::double_exp(2.0).unwrap().variance(), 2.0);
    }

    #[test]
    fn profile_csv_layout() {
        let p = RiskSettings::default()
            .risk_profile(0.8, 1.0, Model::I, 5)
            .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta,risk,bias_sq,variance"));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first[0], -1.0);
        assert_eq!(text.lines().count(), 6);
    }
}
