use serde::{Deserialize, Serialize};

use super::{GFunction, SensitivityMode};
use crate::distortion::DistortionFamily;
use crate::error::{Error, Result};
use crate::models::{std_normal_quantile, ParametricModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Asymptotic interval `δ̂ ± z · θ̂/√n` for the exponential model under the
/// survival power distortion, whose limiting variance is `θ₀²`.
pub fn clt_interval(delta_hat: f64, theta_hat: f64, n: usize, level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level {level} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(theta_hat > 0.0) || !theta_hat.is_finite() {
        return Err(Error::Domain(format!("theta_hat must be positive, got {theta_hat}")));
    }
    let z = std_normal_quantile(0.5 + 0.5 * level)?;
    let half = z * theta_hat / (n as f64).sqrt();
    Ok(Interval {
        lo: delta_hat - half,
        hi: delta_hat + half,
    })
}

/// Whether the closed-form limiting variance is known for this setting.
pub fn clt_available(
    model: ParametricModel,
    family: &DistortionFamily,
    mode: SensitivityMode,
    g: &GFunction,
) -> bool {
    model == ParametricModel::Exponential
        && family.name() == "power-survival"
        && mode == SensitivityMode::Likelihood
        && matches!(g, GFunction::Identity | GFunction::Component(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_width_example() {
        let ci = clt_interval(-0.5, 0.5, 100, 0.95).unwrap();
        let z = 1.959_963_984_540_054;
        assert!((ci.width() / 2.0 - z * 0.05).abs() < 1e-12);
        assert!((ci.width() / 2.0 - 0.098).abs() < 1e-3);
        assert!((ci.lo + ci.hi + 1.0).abs() < 1e-15);
    }

    #[test]
    fn width_scaling() {
        let a = clt_interval(0.0, 0.7, 50, 0.9).unwrap().width();
        let b = clt_interval(0.0, 0.7, 200, 0.9).unwrap().width();
        assert!((a / b - 2.0).abs() < 1e-12);
        let mut last = 0.0;
        for level in [0.5, 0.8, 0.9, 0.95, 0.99] {
            let w = clt_interval(0.0, 0.7, 50, level).unwrap().width();
            assert!(w > last);
            last = w;
        }
    }

    #[test]
    fn guards() {
        assert!(clt_interval(0.0, 0.5, 10, 1.0).is_err());
        assert!(clt_interval(0.0, 0.5, 0, 0.9).is_err());
        assert!(clt_interval(0.0, -0.5, 10, 0.9).is_err());
    }
}
