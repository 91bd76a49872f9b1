use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{ensure_dir, format_vector, opt_str, write_csv, write_json, write_text};
use super::{derive_seed, dgp_label, ExperimentConfig};
use crate::distortion::{DistortionFamily, DistortionRegistry};
use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel, Univariate};
use crate::posterior::{sample_posterior, Target};
use crate::sensitivity::{estimate_delta, GFunction, SensitivityMode};

pub const DEFAULT_DRAWS: usize = 2000;
pub const DEFAULT_N_GRID: [usize; 2] = [50, 200];
pub const DEFAULT_MODELS: [ParametricModel; 3] = [
    ParametricModel::Gamma,
    ParametricModel::LogNormal,
    ParametricModel::Exponential,
];

pub fn default_dgps() -> Vec<Univariate> {
    vec![
        Univariate::Gamma { shape: 1.0, rate: 1.0 },
        Univariate::LogNormal { mu: 0.0, sigma: 1.0 },
        Univariate::Exponential { rate: 1.0 },
    ]
}

/// Published values for the default grid, shown beside computed cells.
/// Priors and sampler settings behind them are unknown, so these are for
/// reading the output, not for checking it.
pub fn reference_value(n: usize, dgp: &str, model: ParametricModel) -> Option<&'static [f64]> {
    const N50: [[&[f64]; 3]; 3] = [
        [&[-0.99, -0.25], &[-1.17, 0.47], &[0.56]],
        [&[-1.19, -0.30], &[-0.80, 0.26], &[0.56]],
        [&[-0.79, -0.22], &[-1.42, 0.52], &[0.62]],
    ];
    const N200: [[&[f64]; 3]; 3] = [
        [&[-0.87, -0.21], &[-1.15, 0.50], &[0.61]],
        [&[-1.13, -0.18], &[-0.85, 0.29], &[0.39]],
        [&[-0.99, -0.28], &[-1.07, 0.41], &[0.66]],
    ];
    let table = match n {
        50 => &N50,
        200 => &N200,
        _ => return None,
    };
    let row = ["Gamma(1,1)", "LogNormal(0,1)", "Exponential(1)"]
        .iter()
        .position(|d| *d == dgp)?;
    let col = DEFAULT_MODELS.iter().position(|m| *m == model)?;
    Some(table[row][col])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub dgp: String,
    pub fitted_model: String,
    pub delta_per_parameter: Vec<f64>,
    /// Mean of `|delta_per_parameter|`; NaN (null in JSON) for a failed cell.
    pub avg_abs_delta: f64,
    pub std_error: Vec<Option<f64>>,
    pub posterior_mean: Vec<f64>,
    pub warnings: Vec<String>,
    /// Set when the cell could not be computed; the run itself continues.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectTable {
    pub n: usize,
    pub dgps: Vec<String>,
    pub models: Vec<String>,
    /// Row-major: one row per data-generating process.
    pub cells: Vec<TableCell>,
}

impl ModelSelectTable {
    pub fn cell(&self, dgp: &str, model: ParametricModel) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.dgp == dgp && c.fitted_model == model.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectResult {
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub family: String,
    pub mode: SensitivityMode,
    pub tables: Vec<ModelSelectTable>,
}

pub fn run_model_select(config: &ExperimentConfig) -> Result<ModelSelectResult> {
    run_model_select_in(config, &DistortionRegistry::builtin())
}

/// [`run_model_select`] resolving the family name in a caller-supplied registry.
pub fn run_model_select_in(
    config: &ExperimentConfig,
    registry: &DistortionRegistry,
) -> Result<ModelSelectResult> {
    let seed = config.seed()?;
    let m = config.draws_or(DEFAULT_DRAWS)?;
    let grid = config.n_grid_or(&DEFAULT_N_GRID)?;
    let models = config.models_or(&DEFAULT_MODELS)?;
    let dgps = config.dgps.clone().unwrap_or_else(default_dgps);
    let family = config.family_in(registry, "power-cdf")?;
    let mode = config.mode.unwrap_or(SensitivityMode::Likelihood);
    if let Some(g) = config.g {
        if g != GFunction::Identity {
            return Err(Error::UnsupportedConfig(
                "model-select reports every parameter component (g = identity)".into(),
            ));
        }
    }
    let priors = models
        .iter()
        .map(|&model| config.prior_for(model))
        .collect::<Result<Vec<_>>>()?;

    let tables = grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            // One sample per data-generating process, shared across the row.
            let data = dgps
                .iter()
                .enumerate()
                .map(|(r, dgp)| {
                    simulate(dgp, n, derive_seed(seed, (k * 1000 + r) as u64))
                })
                .collect::<Result<Vec<_>>>()?;
            let jobs: Vec<(usize, usize)> = (0..dgps.len())
                .flat_map(|r| (0..models.len()).map(move |c| (r, c)))
                .collect();
            let cells = jobs
                .par_iter()
                .map(|&(r, c)| {
                    let cell_seed = derive_seed(seed, (1 << 32) + (k * 1000 + r * 10 + c) as u64);
                    let result = fit_cell(models[c], &priors[c], &data[r], m, cell_seed, &family, mode, config);
                    let dgp = dgp_label(&dgps[r]);
                    let fitted_model = models[c].name().to_string();
                    match result {
                        Ok((delta, std_error, posterior_mean, warnings)) => TableCell {
                            dgp,
                            fitted_model,
                            avg_abs_delta: delta.iter().map(|d| d.abs()).sum::<f64>() / delta.len() as f64,
                            delta_per_parameter: delta,
                            std_error,
                            posterior_mean,
                            warnings,
                            error: None,
                        },
                        Err(e) => TableCell {
                            dgp,
                            fitted_model,
                            delta_per_parameter: Vec::new(),
                            avg_abs_delta: f64::NAN,
                            std_error: Vec::new(),
                            posterior_mean: Vec::new(),
                            warnings: vec![format!("cell failed: {e}")],
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect();
            Ok(ModelSelectTable {
                n,
                dgps: dgps.iter().map(dgp_label).collect(),
                models: models.iter().map(|m| m.name().to_string()).collect(),
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ModelSelectResult {
        seed,
        m,
        family: family.name().to_string(),
        mode,
        tables,
    })
}

fn simulate(dgp: &Univariate, n: usize, seed: u64) -> Result<Dataset> {
    use rand::SeedableRng;
    if n == 0 {
        return Err(Error::Config("sample size must be >= 1".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n).map(|_| dgp.sample(&mut rng)).collect();
    Dataset::new(values, format!("simulated:{}:n={n}:seed={seed}", dgp_label(dgp)))
}

type CellOutput = (Vec<f64>, Vec<Option<f64>>, Vec<f64>, Vec<String>);

#[allow(clippy::too_many_arguments)]
fn fit_cell(
    model: ParametricModel,
    prior: &crate::models::ProductPrior,
    data: &Dataset,
    m: usize,
    seed: u64,
    family: &DistortionFamily,
    mode: SensitivityMode,
    config: &ExperimentConfig,
) -> Result<CellOutput> {
    let target = Target::new(model, prior, data)?;
    let draws = sample_posterior(model, prior, data, m, seed, &config.sampler)?;
    let report = estimate_delta(&draws, &target, family, &GFunction::Identity, mode)?;
    Ok((report.delta, report.std_error, report.posterior_mean, report.warnings))
}

impl ModelSelectResult {
    /// Plain-text tables, one per sample size, with published values beneath
    /// each computed row where they exist.
    pub fn format_tables(&self) -> String {
        let mut s = String::new();
        for t in &self.tables {
            let _ = writeln!(
                s,
                "n = {}, M = {}, family = {}, seed = {}",
                t.n, self.m, self.family, self.seed
            );
            let _ = write!(s, "{:<28}", "DGP \\ fitted");
            for m in &t.models {
                let _ = write!(s, "{m:>22}");
            }
            s.push('\n');
            for (r, dgp) in t.dgps.iter().enumerate() {
                let _ = write!(s, "{dgp:<28}");
                for c in 0..t.models.len() {
                    let cell = &t.cells[r * t.models.len() + c];
                    let text = match &cell.error {
                        Some(_) => "failed".to_string(),
                        None => format_vector(&cell.delta_per_parameter),
                    };
                    let _ = write!(s, "{text:>22}");
                }
                s.push('\n');
                let refs: Vec<Option<&[f64]>> = t
                    .models
                    .iter()
                    .map(|m| m.parse().ok().and_then(|m| reference_value(t.n, dgp, m)))
                    .collect();
                if refs.iter().any(Option::is_some) {
                    let _ = write!(s, "{:<28}", "  reference, not oracle");
                    for r in refs {
                        let _ = write!(s, "{:>22}", r.map(format_vector).unwrap_or_default());
                    }
                    s.push('\n');
                }
            }
            let warned: Vec<&TableCell> = t.cells.iter().filter(|c| !c.warnings.is_empty()).collect();
            for c in warned {
                for w in &c.warnings {
                    let _ = writeln!(s, "warning [{} / {}]: {w}", c.dgp, c.fitted_model);
                }
            }
            s.push('\n');
        }
        s
    }

    /// `model_select.csv` (one row per cell component), `model_select.json`
    /// and `model_select.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        let mut rows = Vec::new();
        for t in &self.tables {
            for c in &t.cells {
                for (j, d) in c.delta_per_parameter.iter().enumerate() {
                    rows.push(vec![
                        t.n.to_string(),
                        c.dgp.clone(),
                        c.fitted_model.clone(),
                        (j + 1).to_string(),
                        d.to_string(),
                        opt_str(c.std_error[j]),
                        c.avg_abs_delta.to_string(),
                    ]);
                }
            }
        }
        write_csv(
            &dir.join("model_select.csv"),
            &["n", "dgp", "fitted_model", "component", "delta", "std_error", "avg_abs_delta"],
            rows,
        )?;
        write_json(&dir.join("model_select.json"), self)?;
        write_text(&dir.join("model_select.txt"), &self.format_tables())
    }
}
