use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PosteriorDraws, PosteriorSampler, SamplerConfig, SamplerKind, Target};
use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel, Univariate};

/// `Gamma(a_post, b_post)` posterior of an exponential rate under a gamma prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePosterior {
    pub a_post: f64,
    pub b_post: f64,
}

impl ConjugatePosterior {
    pub fn mean(&self) -> f64 {
        self.a_post / self.b_post
    }

    pub fn variance(&self) -> f64 {
        self.a_post / (self.b_post * self.b_post)
    }

    pub fn distribution(&self) -> Univariate {
        Univariate::Gamma {
            shape: self.a_post,
            rate: self.b_post,
        }
    }
}

/// Posterior under the survival power distortion with parameter `alpha`:
/// the distorted likelihood is again exponential with rate `alpha θ`, so the
/// posterior stays `Gamma(a + n, b + α Σx)`. `alpha = 1` is the ordinary posterior.
pub fn conjugate_gamma_exponential(
    a: f64,
    b: f64,
    data: &Dataset,
    alpha: f64,
) -> Result<ConjugatePosterior> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "gamma hyperparameters must be positive, got a = {a}, b = {b}"
        )));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be >= 1, got {alpha}")));
    }
    Ok(ConjugatePosterior {
        a_post: a + data.n() as f64,
        b_post: b + alpha * data.sum(),
    })
}

/// Exact i.i.d. draws for the exponential likelihood with a gamma prior.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConjugateSampler;

impl ConjugateSampler {
    fn hyperparameters(target: &Target<'_>) -> Option<(f64, f64)> {
        match (target.model, target.prior.components.as_slice()) {
            (ParametricModel::Exponential, [Univariate::Gamma { shape, rate }]) => {
                Some((*shape, *rate))
            }
            _ => None,
        }
    }
}

impl PosteriorSampler for ConjugateSampler {
    fn name(&self) -> &str {
        "conjugate"
    }

    fn supports(&self, target: &Target<'_>) -> bool {
        Self::hyperparameters(target).is_some()
    }

    fn sample(
        &self,
        target: &Target<'_>,
        draws: usize,
        seed: u64,
        _config: &SamplerConfig,
    ) -> Result<PosteriorDraws> {
        let (a, b) = Self::hyperparameters(target).ok_or_else(|| {
            Error::Config(format!(
                "conjugate sampler needs an exponential model with a single gamma prior, got {}",
                target.model
            ))
        })?;
        if data_has_negative(target.data) {
            return Err(Error::Domain("exponential data must be non-negative".into()));
        }
        let dist = conjugate_gamma_exponential(a, b, target.data, 1.0)?.distribution();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..draws).map(|_| dist.sample(&mut rng)).collect();
        PosteriorDraws::from_flat(
            1,
            values,
            vec!["rate".to_string()],
            seed,
            SamplerKind::ConjugateGammaExponential,
        )
    }
}

fn data_has_negative(data: &Dataset) -> bool {
    data.values.iter().any(|&x| x < 0.0)
}
