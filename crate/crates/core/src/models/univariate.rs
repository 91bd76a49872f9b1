use std::f64::consts::{LN_2, PI, SQRT_2};

use rand::Rng;
use rand_distr::Distribution as _;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A fully specified univariate continuous distribution.
///
/// Used both for a likelihood family evaluated at a parameter value and for
/// the independent components of a prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Univariate {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    Normal { mu: f64, sigma: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

/// `ln Φ(z)` without underflow in the far lower tail.
fn ln_std_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        (0.5 * erfc(-z / SQRT_2)).ln()
    } else {
        // Asymptotic Mills-ratio series; relative error far below 1e-12 here.
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - (-z).ln() - LN_SQRT_2PI + series.ln()
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// `ln(1 - e^{-y})` for `y > 0`.
fn ln_one_minus_exp_neg(y: f64) -> f64 {
    if y > LN_2 {
        (-(-y).exp()).ln_1p()
    } else {
        (-(-y).exp_m1()).ln()
    }
}

impl Univariate {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Univariate::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Ok(Univariate::Gamma {
            shape: positive("shape", shape)?,
            rate: positive("rate", rate)?,
        })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Univariate::LogNormal {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Univariate::Normal {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
        })
    }

    /// Re-checks the parameter domain; deserialized values bypass the constructors.
    pub fn validated(self) -> Result<Self> {
        match self {
            Univariate::Exponential { rate } => Self::exponential(rate),
            Univariate::Gamma { shape, rate } => Self::gamma(shape, rate),
            Univariate::LogNormal { mu, sigma } => Self::lognormal(mu, sigma),
            Univariate::Normal { mu, sigma } => Self::normal(mu, sigma),
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            Univariate::Exponential { rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x
                }
            }
            Univariate::Gamma { shape, rate } => {
                if x < 0.0 || (x == 0.0 && shape > 1.0) {
                    f64::NEG_INFINITY
                } else if x == 0.0 {
                    if shape == 1.0 {
                        rate.ln()
                    } else {
                        f64::INFINITY
                    }
                } else {
                    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
                }
            }
            Univariate::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let lx = x.ln();
                    let z = (lx - mu) / sigma;
                    -lx - sigma.ln() - LN_SQRT_2PI - 0.5 * z * z
                }
            }
            Univariate::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -sigma.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Univariate::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Univariate::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else if x == f64::INFINITY {
                    1.0
                } else {
                    gamma_lr(shape, rate * x)
                }
            }
            Univariate::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - mu) / sigma)
                }
            }
            Univariate::Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            Univariate::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Univariate::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else if x == f64::INFINITY {
                    0.0
                } else {
                    gamma_ur(shape, rate * x)
                }
            }
            Univariate::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    std_normal_cdf(-(x.ln() - mu) / sigma)
                }
            }
            Univariate::Normal { mu, sigma } => std_normal_cdf(-(x - mu) / sigma),
        }
    }

    /// `ln F(x)`, accurate in the lower tail where `F` itself would underflow.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        match *self {
            Univariate::Exponential { rate } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    ln_one_minus_exp_neg(rate * x)
                }
            }
            Univariate::Gamma { .. } => self.cdf(x).ln(),
            Univariate::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    ln_std_normal_cdf((x.ln() - mu) / sigma)
                }
            }
            Univariate::Normal { mu, sigma } => ln_std_normal_cdf((x - mu) / sigma),
        }
    }

    /// `ln S(x)`, accurate in the upper tail.
    pub fn ln_survival(&self, x: f64) -> f64 {
        match *self {
            Univariate::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -rate * x
                }
            }
            Univariate::Gamma { .. } => self.survival(x).ln(),
            Univariate::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    ln_std_normal_cdf(-(x.ln() - mu) / sigma)
                }
            }
            Univariate::Normal { mu, sigma } => ln_std_normal_cdf(-(x - mu) / sigma),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Univariate::Exponential { rate } => 1.0 / rate,
            Univariate::Gamma { shape, rate } => shape / rate,
            Univariate::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Univariate::Normal { mu, .. } => mu,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Univariate::Exponential { rate } => 1.0 / (rate * rate),
            Univariate::Gamma { shape, rate } => shape / (rate * rate),
            Univariate::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                s2.exp_m1() * (2.0 * mu + s2).exp()
            }
            Univariate::Normal { sigma, .. } => sigma * sigma,
        }
    }

    fn positive_support(&self) -> bool {
        !matches!(self, Univariate::Normal { .. })
    }

    /// Inverse CDF by safeguarded Newton iteration on [`Univariate::cdf`].
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) || u.is_nan() {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        if u == 0.0 {
            return Ok(if self.positive_support() {
                0.0
            } else {
                f64::NEG_INFINITY
            });
        }
        if u == 1.0 {
            return Ok(f64::INFINITY);
        }
        if let Univariate::Exponential { rate } = *self {
            return Ok(-(-u).ln_1p() / rate);
        }
        match *self {
            Univariate::Normal { mu, sigma } => {
                return Ok(mu - sigma * SQRT_2 * erfc_inv(2.0 * u))
            }
            Univariate::LogNormal { mu, sigma } => {
                return Ok((mu - sigma * SQRT_2 * erfc_inv(2.0 * u)).exp())
            }
            _ => {}
        }

        let spread = self.variance().sqrt().max(1e-300);
        let (mut lo, mut hi) = if self.positive_support() {
            (0.0, self.mean().max(spread))
        } else {
            (self.mean() - spread, self.mean() + spread)
        };
        while self.cdf(hi) < u {
            let width = hi - lo;
            lo = hi;
            hi += 2.0 * width;
        }
        if !self.positive_support() {
            while self.cdf(lo) > u {
                let width = hi - lo;
                hi = lo;
                lo -= 2.0 * width;
            }
        }

        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.cdf(x) - u;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let density = self.pdf(x);
            let newton = x - f / density;
            let next = if density > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Parameters are validated on construction, so these cannot fail.
        match *self {
            Univariate::Exponential { rate } => rand_distr::Exp::new(rate).unwrap().sample(rng),
            Univariate::Gamma { shape, rate } => rand_distr::Gamma::new(shape, 1.0 / rate)
                .unwrap()
                .sample(rng),
            Univariate::LogNormal { mu, sigma } => {
                rand_distr::LogNormal::new(mu, sigma).unwrap().sample(rng)
            }
            Univariate::Normal { mu, sigma } => {
                rand_distr::Normal::new(mu, sigma).unwrap().sample(rng)
            }
        }
    }
}

/// Density of the standard normal at zero, `(2π)^{-1/2}`.
pub fn std_normal_density_at_zero() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

/// Standard normal quantile, used for interval construction.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    Univariate::Normal {
        mu: 0.0,
        sigma: 1.0,
    }
    .quantile(p)
}
