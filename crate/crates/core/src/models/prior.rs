use serde::{Deserialize, Serialize};

use super::Univariate;
use crate::error::{Error, Result};

/// Independent univariate priors, one per parameter component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPrior {
    pub components: Vec<Univariate>,
}

impl ProductPrior {
    pub fn new(components: Vec<Univariate>) -> Result<Self> {
        let components = components
            .into_iter()
            .map(Univariate::validated)
            .collect::<Result<_>>()?;
        Ok(ProductPrior { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    pub fn log_density(&self, theta: &[f64]) -> Result<f64> {
        self.check(theta)?;
        Ok(self
            .components
            .iter()
            .zip(theta)
            .map(|(c, &t)| c.log_pdf(t))
            .sum())
    }

    /// Componentwise prior CDF values.
    pub fn cdf(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check(theta)?;
        Ok(self.components.iter().zip(theta).map(|(c, &t)| c.cdf(t)).collect())
    }
}

/// Componentwise prior CDF at `theta`.
pub fn prior_cdf(prior: &ProductPrior, theta: &[f64]) -> Result<Vec<f64>> {
    prior.cdf(theta)
}
