//! Sampling the ordinary (non-distorted) posterior, and importance
//! reweighting of those draws towards a distorted posterior.

mod conjugate;
mod draws;
mod metropolis;
mod reweight;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use conjugate::{conjugate_gamma_exponential, ConjugatePosterior, ConjugateSampler};
pub use draws::{PosteriorDraws, SamplerKind};
pub use metropolis::RandomWalkMetropolis;
pub use reweight::{distorted_expectation_reweighted, ReweightedEstimate};

use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel, ProductPrior};

/// The posterior being sampled: likelihood family, prior, and data.
#[derive(Debug, Clone, Copy)]
pub struct Target<'a> {
    pub model: ParametricModel,
    pub prior: &'a ProductPrior,
    pub data: &'a Dataset,
}

impl<'a> Target<'a> {
    pub fn new(model: ParametricModel, prior: &'a ProductPrior, data: &'a Dataset) -> Result<Self> {
        if prior.dim() != model.parameter_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.parameter_dim(),
                got: prior.dim(),
            });
        }
        Ok(Target { model, prior, data })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Registered sampler name, or `"auto"` to take the first that supports the target.
    pub sampler: String,
    pub burn_in: usize,
    pub thinning: usize,
    pub chain_count: usize,
    /// Proposal scale on the unconstrained axis; chosen from `n` when unset.
    pub initial_step: Option<f64>,
    pub target_acceptance: f64,
    pub adapt_interval: usize,
    /// Starting point; moment estimates when unset.
    pub init: Option<Vec<f64>>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            sampler: "auto".into(),
            burn_in: 5000,
            thinning: 1,
            chain_count: 1,
            initial_step: None,
            target_acceptance: 0.35,
            adapt_interval: 50,
            init: None,
        }
    }
}

pub trait PosteriorSampler: Send + Sync {
    fn name(&self) -> &str;

    fn supports(&self, target: &Target<'_>) -> bool;

    fn sample(
        &self,
        target: &Target<'_>,
        draws: usize,
        seed: u64,
        config: &SamplerConfig,
    ) -> Result<PosteriorDraws>;
}

/// Samplers by name. Iteration order is the `auto` preference order.
#[derive(Clone)]
pub struct SamplerRegistry {
    order: Vec<String>,
    samplers: BTreeMap<String, Arc<dyn PosteriorSampler>>,
}

impl SamplerRegistry {
    pub fn empty() -> Self {
        SamplerRegistry {
            order: Vec::new(),
            samplers: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(ConjugateSampler));
        r.register(Arc::new(RandomWalkMetropolis));
        r
    }

    pub fn register(&mut self, sampler: Arc<dyn PosteriorSampler>) {
        let name = sampler.name().to_string();
        if self.samplers.insert(name.clone(), sampler).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PosteriorSampler>> {
        self.samplers.get(name).cloned().ok_or_else(|| Error::Unknown {
            what: "sampler",
            name: name.to_string(),
        })
    }

    /// Resolves `name`, where `"auto"` picks the first sampler supporting `target`.
    pub fn resolve(&self, name: &str, target: &Target<'_>) -> Result<Arc<dyn PosteriorSampler>> {
        if name != "auto" {
            return self.get(name);
        }
        self.order
            .iter()
            .map(|n| &self.samplers[n])
            .find(|s| s.supports(target))
            .cloned()
            .ok_or_else(|| Error::Config(format!("no sampler supports model {}", target.model)))
    }
}

impl Default for SamplerRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Draws `draws` parameter vectors from the ordinary posterior.
pub fn sample_posterior(
    model: ParametricModel,
    prior: &ProductPrior,
    data: &Dataset,
    draws: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<PosteriorDraws> {
    if draws < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: draws,
        });
    }
    if data.is_empty() {
        return Err(Error::Domain("posterior sampling needs at least one observation".into()));
    }
    let target = Target::new(model, prior, data)?;
    SamplerRegistry::builtin()
        .resolve(&config.sampler, &target)?
        .sample(&target, draws, seed, config)
}
