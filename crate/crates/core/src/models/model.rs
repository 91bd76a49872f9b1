use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, ProductPrior, Univariate};
use crate::error::{Error, Result};

/// A likelihood family; the parameter vector `theta` is supplied per call.
///
/// `CenteredNormal` is the normal location family with the mean pinned at
/// zero, parameterized by its scale only. It is the one family symmetric
/// about zero for every parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParametricModel {
    /// `theta = [rate]`
    Exponential,
    /// `theta = [shape, rate]`
    Gamma,
    /// `theta = [mu, sigma]`
    #[serde(rename = "lognormal")]
    LogNormal,
    /// `theta = [mu, sigma]`
    Normal,
    /// `theta = [sigma]`, mean fixed at 0
    CenteredNormal,
}

impl ParametricModel {
    pub const ALL: [ParametricModel; 5] = [
        ParametricModel::Exponential,
        ParametricModel::Gamma,
        ParametricModel::LogNormal,
        ParametricModel::Normal,
        ParametricModel::CenteredNormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParametricModel::Exponential => "exponential",
            ParametricModel::Gamma => "gamma",
            ParametricModel::LogNormal => "lognormal",
            ParametricModel::Normal => "normal",
            ParametricModel::CenteredNormal => "centered-normal",
        }
    }

    pub fn parameter_dim(self) -> usize {
        self.parameter_names().len()
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ParametricModel::Exponential => &["rate"],
            ParametricModel::Gamma => &["shape", "rate"],
            ParametricModel::LogNormal | ParametricModel::Normal => &["mu", "sigma"],
            ParametricModel::CenteredNormal => &["sigma"],
        }
    }

    /// Which components of `theta` are constrained to be strictly positive.
    pub fn positive_components(self) -> &'static [bool] {
        match self {
            ParametricModel::Exponential | ParametricModel::CenteredNormal => &[true],
            ParametricModel::Gamma => &[true, true],
            ParametricModel::LogNormal | ParametricModel::Normal => &[false, true],
        }
    }

    pub fn symmetric_about_zero(self) -> bool {
        matches!(self, ParametricModel::CenteredNormal)
    }

    pub fn positive_support(self) -> bool {
        matches!(
            self,
            ParametricModel::Exponential | ParametricModel::Gamma | ParametricModel::LogNormal
        )
    }

    pub fn check_theta(self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.parameter_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_dim(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// The observation distribution at `theta`.
    pub fn distribution(self, theta: &[f64]) -> Result<Univariate> {
        self.check_theta(theta)?;
        match self {
            ParametricModel::Exponential => Univariate::exponential(theta[0]),
            ParametricModel::Gamma => Univariate::gamma(theta[0], theta[1]),
            ParametricModel::LogNormal => Univariate::lognormal(theta[0], theta[1]),
            ParametricModel::Normal => Univariate::normal(theta[0], theta[1]),
            ParametricModel::CenteredNormal => Univariate::normal(0.0, theta[0]),
        }
    }

    pub fn log_pdf(self, theta: &[f64], x: f64) -> Result<f64> {
        Ok(self.distribution(theta)?.log_pdf(x))
    }

    pub fn cdf(self, theta: &[f64], x: f64) -> Result<f64> {
        Ok(self.distribution(theta)?.cdf(x))
    }

    pub fn survival(self, theta: &[f64], x: f64) -> Result<f64> {
        Ok(self.distribution(theta)?.survival(x))
    }

    /// Draws `n` i.i.d. observations with a private generator seeded by `seed`.
    pub fn simulate(self, theta: &[f64], n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Domain("simulate needs n >= 1".into()));
        }
        let dist = self.distribution(theta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n).map(|_| dist.sample(&mut rng)).collect();
        Dataset::new(values, format!("simulated:{}{:?}:seed={seed}", self.name(), theta))
    }

    /// Full-data log-likelihood from sufficient statistics.
    pub fn log_likelihood(self, theta: &[f64], stats: &SufficientStats) -> f64 {
        let Ok(dist) = self.distribution(theta) else {
            return f64::NEG_INFINITY;
        };
        if self.positive_support() && stats.min <= 0.0 {
            // Zero is in the support of exponential and shape-1 gamma only.
            if stats.min < 0.0 || !matches!(self, ParametricModel::Exponential | ParametricModel::Gamma) {
                return f64::NEG_INFINITY;
            }
        }
        let n = stats.n as f64;
        match dist {
            Univariate::Exponential { rate } => n * rate.ln() - rate * stats.sum_x,
            Univariate::Gamma { shape, rate } => {
                if stats.min == 0.0 && shape != 1.0 {
                    return if shape > 1.0 { f64::NEG_INFINITY } else { f64::INFINITY };
                }
                let ln_term = if shape == 1.0 { 0.0 } else { (shape - 1.0) * stats.sum_ln_x };
                n * (shape * rate.ln() - statrs::function::gamma::ln_gamma(shape)) + ln_term
                    - rate * stats.sum_x
            }
            Univariate::LogNormal { mu, sigma } => {
                let ss = stats.sum_ln_x2 - 2.0 * mu * stats.sum_ln_x + n * mu * mu;
                -stats.sum_ln_x - n * (sigma.ln() + 0.918_938_533_204_672_8) - 0.5 * ss / (sigma * sigma)
            }
            Univariate::Normal { mu, sigma } => {
                let ss = stats.sum_x2 - 2.0 * mu * stats.sum_x + n * mu * mu;
                -n * (sigma.ln() + 0.918_938_533_204_672_8) - 0.5 * ss / (sigma * sigma)
            }
        }
    }

    /// Weakly informative product prior used when a run does not configure one.
    pub fn default_prior(self) -> ProductPrior {
        let gamma21 = Univariate::Gamma { shape: 2.0, rate: 1.0 };
        let wide_normal = Univariate::Normal { mu: 0.0, sigma: 10.0 };
        let components = match self {
            ParametricModel::Exponential => vec![Univariate::Gamma { shape: 1.0, rate: 1.0 }],
            ParametricModel::Gamma => vec![gamma21, gamma21],
            ParametricModel::LogNormal | ParametricModel::Normal => vec![wide_normal, gamma21],
            ParametricModel::CenteredNormal => vec![gamma21],
        };
        ProductPrior { components }
    }

    /// Crude moment-based starting point for samplers.
    pub fn moment_estimate(self, data: &Dataset) -> Vec<f64> {
        let n = data.n() as f64;
        let mean = data.values.iter().sum::<f64>() / n;
        let var = data.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let var = if var > 0.0 { var } else { mean.abs().max(1.0) };
        match self {
            ParametricModel::Exponential => vec![1.0 / mean.max(f64::MIN_POSITIVE)],
            ParametricModel::Gamma => vec![mean * mean / var, mean / var],
            ParametricModel::LogNormal => {
                let logs: Vec<f64> = data.values.iter().map(|x| x.max(f64::MIN_POSITIVE).ln()).collect();
                let m = logs.iter().sum::<f64>() / n;
                let v = logs.iter().map(|l| (l - m).powi(2)).sum::<f64>() / n;
                vec![m, v.sqrt().max(1e-3)]
            }
            ParametricModel::Normal => vec![mean, var.sqrt()],
            ParametricModel::CenteredNormal => {
                vec![(data.values.iter().map(|x| x * x).sum::<f64>() / n).sqrt().max(1e-3)]
            }
        }
    }
}

impl fmt::Display for ParametricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParametricModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParametricModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "model",
                name: s.to_string(),
            })
    }
}

/// Sums that make every supported log-likelihood O(1) to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub n: usize,
    pub min: f64,
    pub sum_x: f64,
    pub sum_x2: f64,
    pub sum_ln_x: f64,
    pub sum_ln_x2: f64,
}

impl SufficientStats {
    pub fn new(data: &Dataset) -> Self {
        let mut s = SufficientStats {
            n: data.n(),
            min: f64::INFINITY,
            sum_x: 0.0,
            sum_x2: 0.0,
            sum_ln_x: 0.0,
            sum_ln_x2: 0.0,
        };
        for &x in &data.values {
            s.min = s.min.min(x);
            s.sum_x += x;
            s.sum_x2 += x * x;
            if x > 0.0 {
                let l = x.ln();
                s.sum_ln_x += l;
                s.sum_ln_x2 += l * l;
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for m in ParametricModel::ALL {
            assert_eq!(m.name().parse::<ParametricModel>().unwrap(), m);
            assert_eq!(m.positive_components().len(), m.parameter_dim());
            assert_eq!(m.default_prior().dim(), m.parameter_dim());
        }
        assert!("weibull".parse::<ParametricModel>().is_err());
    }

    #[test]
    fn symmetric_only_for_centered_normal() {
        for m in ParametricModel::ALL {
            assert_eq!(m.symmetric_about_zero(), m == ParametricModel::CenteredNormal);
        }
    }

    #[test]
    fn dimension_and_domain_errors() {
        assert!(matches!(
            ParametricModel::Gamma.log_pdf(&[1.0], 1.0),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            ParametricModel::Exponential.cdf(&[-1.0], 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sufficient_stat_likelihood_matches_direct_sum() {
        let cases: [(ParametricModel, &[f64], &[f64]); 5] = [
            (ParametricModel::Exponential, &[0.7], &[0.3, 1.2, 4.0]),
            (ParametricModel::Gamma, &[2.3, 0.9], &[0.3, 1.2, 4.0]),
            (ParametricModel::LogNormal, &[0.2, 0.8], &[0.3, 1.2, 4.0]),
            (ParametricModel::Normal, &[-0.5, 1.7], &[-0.3, 1.2, 4.0]),
            (ParametricModel::CenteredNormal, &[1.3], &[-0.3, 1.2, 4.0]),
        ];
        for (model, theta, xs) in cases {
            let data = Dataset::new(xs.to_vec(), "t").unwrap();
            let direct: f64 = xs.iter().map(|&x| model.log_pdf(theta, x).unwrap()).sum();
            let fast = model.log_likelihood(theta, &SufficientStats::new(&data));
            assert!((direct - fast).abs() < 1e-12, "{model}: {direct} vs {fast}");
        }
        let neg = Dataset::new(vec![-1.0, 2.0], "t").unwrap();
        assert_eq!(
            ParametricModel::Gamma.log_likelihood(&[2.0, 1.0], &SufficientStats::new(&neg)),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn simulate_contract() {
        let a = ParametricModel::Exponential.simulate(&[0.5], 10, 7).unwrap();
        let b = ParametricModel::Exponential.simulate(&[0.5], 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(ParametricModel::Gamma.simulate(&[2.0, 1.0], 1, 1).unwrap().n(), 1);
        assert!(ParametricModel::Gamma.simulate(&[2.0, 1.0], 0, 1).is_err());
        assert!(ParametricModel::Gamma.simulate(&[-2.0, 1.0], 3, 1).is_err());
    }

    #[test]
    fn exponential_sample_mean() {
        let n = 100_000;
        let d = ParametricModel::Exponential.simulate(&[0.5], n, 2024).unwrap();
        let mean = d.values.iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 3.0 * 2.0 / (n as f64).sqrt(), "mean {mean}");
    }
}
