use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{PosteriorDraws, PosteriorSampler, SamplerConfig, SamplerKind, Target};
use crate::error::{Error, Result};
use crate::models::SufficientStats;

/// Componentwise Gaussian random-walk Metropolis on the unconstrained scale
/// (log for positive parameters), with step sizes adapted during burn-in and
/// frozen afterwards.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomWalkMetropolis;

struct Chain<'a> {
    target: &'a Target<'a>,
    stats: SufficientStats,
    positive: &'static [bool],
}

impl Chain<'_> {
    fn to_theta(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.positive)
            .map(|(&v, &p)| if p { v.exp() } else { v })
            .collect()
    }

    /// Log posterior density on the unconstrained scale, Jacobian included.
    fn log_target(&self, z: &[f64]) -> f64 {
        let theta = self.to_theta(z);
        if theta.iter().any(|t| !t.is_finite()) || theta.iter().zip(self.positive).any(|(&t, &p)| p && t <= 0.0) {
            return f64::NEG_INFINITY;
        }
        let ll = self.target.model.log_likelihood(&theta, &self.stats);
        let lp = self.target.prior.log_density(&theta).unwrap_or(f64::NEG_INFINITY);
        let jac: f64 = z.iter().zip(self.positive).filter(|(_, &p)| p).map(|(v, _)| v).sum();
        let total = ll + lp + jac;
        if total.is_nan() {
            f64::NEG_INFINITY
        } else {
            total
        }
    }
}

struct ChainOutput {
    draws: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

fn run_chain(
    chain: &Chain<'_>,
    init: &[f64],
    keep: usize,
    seed: u64,
    stream: u64,
    config: &SamplerConfig,
) -> ChainOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let k = init.len();
    let n = chain.stats.n.max(1) as f64;
    let mut z: Vec<f64> = init
        .iter()
        .zip(chain.positive)
        .map(|(&t, &p)| if p { t.ln() } else { t })
        .collect();
    let mut lp = chain.log_target(&z);
    let mut steps: Vec<f64> = init
        .iter()
        .zip(chain.positive)
        .map(|(&t, &p)| {
            let scale = if p { 1.0 } else { t.abs().max(1.0) };
            config.initial_step.unwrap_or(2.0 * scale / n.sqrt())
        })
        .collect();

    let interval = config.adapt_interval.max(1);
    let mut batch_accepts = vec![0usize; k];
    let mut batch_index = 0usize;
    let mut out = ChainOutput {
        draws: Vec::with_capacity(keep * k),
        accepted: 0,
        proposed: 0,
    };

    let total = config.burn_in + keep * config.thinning;
    for iter in 0..total {
        let burning = iter < config.burn_in;
        for j in 0..k {
            let old = z[j];
            let eps: f64 = rng.sample(StandardNormal);
            z[j] = old + steps[j] * eps;
            let proposal = chain.log_target(&z);
            let u: f64 = rng.random();
            let accept = proposal.is_finite() && u.ln() < proposal - lp;
            if accept {
                lp = proposal;
            } else {
                z[j] = old;
            }
            if burning {
                batch_accepts[j] += accept as usize;
            } else {
                out.proposed += 1;
                out.accepted += accept as u64;
            }
        }
        if burning && (iter + 1) % interval == 0 {
            batch_index += 1;
            let delta = (1.0 / (batch_index as f64).sqrt()).min(0.5);
            for j in 0..k {
                let rate = batch_accepts[j] as f64 / interval as f64;
                if rate > config.target_acceptance {
                    steps[j] *= delta.exp();
                } else {
                    steps[j] *= (-delta).exp();
                }
                batch_accepts[j] = 0;
            }
        }
        if !burning && (iter - config.burn_in + 1).is_multiple_of(config.thinning) {
            out.draws.extend(chain.to_theta(&z));
        }
    }
    out
}

impl PosteriorSampler for RandomWalkMetropolis {
    fn name(&self) -> &str {
        "metropolis"
    }

    fn supports(&self, target: &Target<'_>) -> bool {
        target.prior.dim() == target.model.parameter_dim()
    }

    fn sample(
        &self,
        target: &Target<'_>,
        draws: usize,
        seed: u64,
        config: &SamplerConfig,
    ) -> Result<PosteriorDraws> {
        let k = target.model.parameter_dim();
        if target.prior.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: target.prior.dim(),
            });
        }
        if config.thinning == 0 || config.chain_count == 0 {
            return Err(Error::Config("thinning and chain_count must be >= 1".into()));
        }
        let chain = Chain {
            target,
            stats: SufficientStats::new(target.data),
            positive: target.model.positive_components(),
        };
        let init = match &config.init {
            Some(init) => {
                target.model.check_theta(init)?;
                init.clone()
            }
            None => target.model.moment_estimate(target.data),
        };
        let init_z: Vec<f64> = init
            .iter()
            .zip(chain.positive)
            .map(|(&t, &p)| if p { t.ln() } else { t })
            .collect();
        let lp0 = chain.log_target(&init_z);
        if !lp0.is_finite() {
            return Err(Error::Initialization(format!(
                "log posterior is {lp0} at the starting point {init:?}"
            )));
        }

        let chains = config.chain_count;
        let per_chain: Vec<usize> = (0..chains)
            .map(|c| draws / chains + usize::from(c < draws % chains))
            .collect();
        let outputs: Vec<ChainOutput> = per_chain
            .par_iter()
            .enumerate()
            .map(|(c, &keep)| run_chain(&chain, &init, keep, seed, c as u64, config))
            .collect();

        let (accepted, proposed) = outputs
            .iter()
            .fold((0u64, 0u64), |(a, p), o| (a + o.accepted, p + o.proposed));
        let values: Vec<f64> = outputs.into_iter().flat_map(|o| o.draws).collect();
        let names = target.model.parameter_names().iter().map(|s| s.to_string()).collect();
        let mut out =
            PosteriorDraws::from_flat(k, values, names, seed, SamplerKind::RandomWalkMetropolis)?;
        let rate = if proposed > 0 {
            accepted as f64 / proposed as f64
        } else {
            0.0
        };
        out.acceptance_rate = Some(rate);
        out.chain_count = chains;
        out.burn_in = config.burn_in;
        out.thinning = config.thinning;
        if !(0.05..=0.95).contains(&rate) {
            out.warnings.push(format!(
                "metropolis acceptance rate {rate:.3} outside [0.05, 0.95] after adaptation"
            ));
        }
        Ok(out)
    }
}
