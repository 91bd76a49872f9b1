use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distortion::{DistortionFamily, DistortionRegistry};
use crate::error::{Error, Result};
use crate::models::{ParametricModel, ProductPrior, Univariate};
use crate::posterior::SamplerConfig;
use crate::sensitivity::{GFunction, SensitivityMode};

/// Smallest posterior sample size any experiment accepts.
pub const MIN_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Converge,
    ModelSelect,
    Report,
    Sensitivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// CSV file; relative paths resolve against the config file's directory.
    pub path: PathBuf,
    /// Header name of the value column. Without it the first column is used.
    pub column: Option<String>,
    pub units: Option<String>,
    /// Display name in reports.
    pub label: Option<String>,
}

/// Experiment settings read from TOML. Unset optional fields fall back to
/// per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    /// Master seed. Required, either here or on the command line.
    pub seed: Option<u64>,
    /// Posterior draws `M`.
    pub draws: Option<usize>,
    /// Sample sizes for simulated data, strictly increasing.
    pub n_grid: Option<Vec<usize>>,
    pub models: Option<Vec<ParametricModel>>,
    pub family: Option<String>,
    pub g: Option<GFunction>,
    pub mode: Option<SensitivityMode>,
    /// Data-generating distribution for `converge` and `sensitivity`.
    pub dgp: Option<Univariate>,
    /// Data-generating distributions for `model-select`.
    pub dgps: Option<Vec<Univariate>>,
    /// Per-model prior components, keyed by model name.
    pub priors: BTreeMap<String, Vec<Univariate>>,
    pub sampler: SamplerConfig,
    pub dataset: Option<DatasetConfig>,
    /// Step for the optional finite-difference cross-check.
    pub fd_epsilon: Option<f64>,
    pub histogram_bins: Option<usize>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Toml(t) => Error::Config(format!("{}: {t}", path.display())),
            other => other,
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Checks every field that is set.
    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.draws {
            check_draws(m)?;
        }
        if let Some(grid) = &self.n_grid {
            check_grid(grid)?;
        }
        if let Some(models) = &self.models {
            check_models(models)?;
        }
        if let Some(dgps) = &self.dgps {
            if dgps.is_empty() {
                return Err(Error::Config("dgps list is empty".into()));
            }
        }
        if let Some(eps) = self.fd_epsilon {
            if !(1e-6..=1e-2).contains(&eps) {
                return Err(Error::Config(format!("fd_epsilon = {eps} outside [1e-6, 1e-2]")));
            }
        }
        if self.histogram_bins == Some(0) {
            return Err(Error::Config("histogram_bins must be >= 1".into()));
        }
        for (name, comps) in &self.priors {
            let model: ParametricModel = name.parse()?;
            if comps.len() != model.parameter_dim() {
                return Err(Error::Config(format!(
                    "prior for {name} has {} components, model has {}",
                    comps.len(),
                    model.parameter_dim()
                )));
            }
            for c in comps {
                c.validated()?;
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("no seed given; set `seed` or pass --seed".into()))
    }

    pub fn draws_or(&self, default: usize) -> Result<usize> {
        let m = self.draws.unwrap_or(default);
        check_draws(m)?;
        Ok(m)
    }

    pub fn n_grid_or(&self, default: &[usize]) -> Result<Vec<usize>> {
        let grid = self.n_grid.clone().unwrap_or_else(|| default.to_vec());
        check_grid(&grid)?;
        Ok(grid)
    }

    pub fn models_or(&self, default: &[ParametricModel]) -> Result<Vec<ParametricModel>> {
        let models = self.models.clone().unwrap_or_else(|| default.to_vec());
        check_models(&models)?;
        Ok(models)
    }

    pub fn family_in(&self, registry: &DistortionRegistry, default: &str) -> Result<DistortionFamily> {
        registry.get(self.family.as_deref().unwrap_or(default))
    }

    pub fn prior_for(&self, model: ParametricModel) -> Result<ProductPrior> {
        match self.priors.get(model.name()) {
            Some(comps) => ProductPrior::new(comps.clone()),
            None => Ok(model.default_prior()),
        }
    }

    /// Dataset path resolved against the config file's directory.
    pub fn dataset_path(&self) -> Option<PathBuf> {
        self.dataset.as_ref().map(|d| match &self.base_dir {
            Some(base) if d.path.is_relative() => base.join(&d.path),
            _ => d.path.clone(),
        })
    }
}

fn check_draws(m: usize) -> Result<()> {
    if m < MIN_DRAWS {
        return Err(Error::Config(format!("draws = {m} below the minimum of {MIN_DRAWS}")));
    }
    Ok(())
}

fn check_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("n_grid is empty".into()));
    }
    if grid[0] == 0 {
        return Err(Error::Config("n_grid entries must be >= 1".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "n_grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_models(models: &[ParametricModel]) -> Result<()> {
    if models.is_empty() {
        return Err(Error::Config("model list is empty".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            experiment = "model-select"
            seed = 7
            draws = 2000
            n_grid = [50, 200]
            models = ["gamma", "lognormal", "exponential"]
            family = "power-cdf"
            g = "component:1"
            mode = "likelihood"
            dgps = [{ family = "gamma", shape = 1.0, rate = 1.0 }]

            [dgp]
            family = "exponential"
            rate = 0.5

            [priors]
            exponential = [{ family = "gamma", shape = 2.0, rate = 3.0 }]

            [sampler]
            burn_in = 100
            "#,
        )
        .unwrap();
        assert_eq!(c.experiment, Some(ExperimentKind::ModelSelect));
        assert_eq!(c.g, Some(GFunction::Component(1)));
        assert_eq!(c.dgp, Some(Univariate::Exponential { rate: 0.5 }));
        assert_eq!(c.sampler.burn_in, 100);
        assert_eq!(c.sampler.thinning, 1);
        let p = c.prior_for(ParametricModel::Exponential).unwrap();
        assert_eq!(p.components[0], Univariate::Gamma { shape: 2.0, rate: 3.0 });
        assert_eq!(c.prior_for(ParametricModel::Gamma).unwrap(), ParametricModel::Gamma.default_prior());
    }

    #[test]
    fn guards() {
        let bad = [
            "n_grid = [64, 27]",
            "n_grid = [27, 27]",
            "n_grid = []",
            "draws = 99",
            "models = []",
            "fd_epsilon = 0.1",
            "colour = 3",
            "[priors]\ngamma = [{ family = \"gamma\", shape = 1.0, rate = 1.0 }]",
            "[priors]\nweibull = []",
        ];
        for b in bad {
            assert!(ExperimentConfig::from_toml_str(b).is_err(), "{b}");
        }
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert!(matches!(c.seed(), Err(Error::Config(_))));
        assert_eq!(c.with_seed(3).seed().unwrap(), 3);
    }

    #[test]
    fn defaults_are_validated_too() {
        let c = ExperimentConfig::default();
        assert!(c.draws_or(50).is_err());
        assert!(c.n_grid_or(&[3, 2]).is_err());
        assert!(c.models_or(&[]).is_err());
        assert_eq!(c.n_grid_or(&[27, 64]).unwrap(), vec![27, 64]);
    }
}
