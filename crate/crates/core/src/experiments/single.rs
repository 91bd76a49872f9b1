use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::{ensure_dir, write_csv, write_json};
use super::report::load_dataset;
use super::{derive_seed, ExperimentConfig};
use crate::distortion::DistortionRegistry;
use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel};
use crate::posterior::{sample_posterior, Target};
use crate::sensitivity::{
    estimate_delta, finite_difference_check, GFunction, SensitivityMode, SensitivityReport,
};

pub const DEFAULT_DRAWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleResult {
    pub model: ParametricModel,
    pub source: String,
    pub report: SensitivityReport,
    /// Central-difference derivative of the reweighted expectation, when
    /// `fd_epsilon` is configured.
    pub delta_fd: Option<Vec<f64>>,
    pub fd_epsilon: Option<f64>,
}

/// One sensitivity estimate for a single model, on the configured dataset or
/// on a sample simulated from `dgp` with size `n_grid[0]`.
pub fn run_sensitivity(config: &ExperimentConfig) -> Result<SingleResult> {
    let seed = config.seed()?;
    let m = config.draws_or(DEFAULT_DRAWS)?;
    let models = config.models_or(&[ParametricModel::Exponential])?;
    if models.len() != 1 {
        return Err(Error::Config(format!(
            "sensitivity takes exactly one model, got {}",
            models.len()
        )));
    }
    let model = models[0];
    let family = config.family_in(&DistortionRegistry::builtin(), "power-survival")?;
    let g = config.g.unwrap_or(GFunction::Identity);
    let mode = config.mode.unwrap_or(SensitivityMode::Likelihood);

    let data = match (&config.dataset, &config.dgp) {
        (Some(_), _) => load_dataset(config, &models)?,
        (None, Some(dgp)) => {
            let grid = config.n_grid_or(&[])?;
            if grid.len() != 1 {
                return Err(Error::Config("simulated sensitivity needs a single-entry n_grid".into()));
            }
            simulate(dgp, grid[0], derive_seed(seed, 0))?
        }
        (None, None) => {
            return Err(Error::Config("sensitivity needs a [dataset] or a [dgp]".into()))
        }
    };
    let prior = config.prior_for(model)?;
    let target = Target::new(model, &prior, &data)?;
    let draws = sample_posterior(model, &prior, &data, m, derive_seed(seed, 1), &config.sampler)?;
    let report = estimate_delta(&draws, &target, &family, &g, mode)?;
    let delta_fd = match config.fd_epsilon {
        Some(eps) => Some(finite_difference_check(&draws, &target, &family, &g, eps, mode)?.delta_fd),
        None => None,
    };
    Ok(SingleResult {
        model,
        source: data.source.clone(),
        report,
        delta_fd,
        fd_epsilon: config.fd_epsilon,
    })
}

fn simulate(dgp: &crate::models::Univariate, n: usize, seed: u64) -> Result<Dataset> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n).map(|_| dgp.sample(&mut rng)).collect();
    Dataset::new(values, format!("simulated:{}:n={n}:seed={seed}", super::dgp_label(dgp)))
}

impl SingleResult {
    /// `sensitivity.json` and `sensitivity.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_json(&dir.join("sensitivity.json"), self)?;
        write_csv(
            &dir.join("sensitivity.csv"),
            &SensitivityReport::CSV_HEADER,
            self.report.csv_records(),
        )
    }
}
