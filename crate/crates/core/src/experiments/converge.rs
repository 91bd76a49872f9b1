use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{ensure_dir, write_csv, write_json};
use super::{derive_seed, ExperimentConfig};
use crate::distortion::DistortionRegistry;
use crate::error::{Error, Result};
use crate::models::{ParametricModel, Univariate};
use crate::posterior::{sample_posterior, Target};
use crate::sensitivity::{estimate_delta, GFunction, SensitivityMode};

pub const DEFAULT_THETA0: f64 = 0.5;
pub const DEFAULT_DRAWS: usize = 10_000;

/// `{ j³ : j = 3, …, 10 }`.
pub fn default_n_grid() -> Vec<usize> {
    (3..=10).map(|j: usize| j.pow(3)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    pub n: usize,
    pub delta: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub std_error: Option<f64>,
    pub posterior_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeResult {
    pub theta0: f64,
    /// Limit of the sensitivity as `n` grows, `−θ₀`.
    pub reference: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub family: String,
    pub rows: Vec<ConvergeRow>,
    /// Interval width at the smallest `n` over the width at the largest.
    pub width_ratio: f64,
    pub warnings: Vec<String>,
}

/// Sensitivity of the exponential posterior mean under the survival power
/// distortion, for a fresh simulated sample at each grid size.
pub fn run_converge(config: &ExperimentConfig) -> Result<ConvergeResult> {
    let seed = config.seed()?;
    let theta0 = match config.dgp {
        None => DEFAULT_THETA0,
        Some(Univariate::Exponential { rate }) => rate,
        Some(other) => {
            return Err(Error::UnsupportedConfig(format!(
                "converge needs an exponential data-generating process, got {}",
                super::dgp_label(&other)
            )))
        }
    };
    if let Some(models) = &config.models {
        if models != &[ParametricModel::Exponential] {
            return Err(Error::UnsupportedConfig("converge fits the exponential model only".into()));
        }
    }
    let family = config.family_in(&DistortionRegistry::builtin(), "power-survival")?;
    if family.name() != "power-survival" {
        return Err(Error::UnsupportedConfig(format!(
            "converge needs the power-survival family, got {}",
            family.name()
        )));
    }
    if config.mode.is_some_and(|m| m != SensitivityMode::Likelihood) {
        return Err(Error::UnsupportedConfig("converge distorts the likelihood only".into()));
    }
    if config.g.is_some_and(|g| g != GFunction::Identity) {
        return Err(Error::UnsupportedConfig("converge uses g = identity".into()));
    }
    let m = config.draws_or(DEFAULT_DRAWS)?;
    let grid = config.n_grid_or(&default_n_grid())?;
    let model = ParametricModel::Exponential;
    let prior = config.prior_for(model)?;

    let rows: Vec<Result<(ConvergeRow, Vec<String>)>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let i = i as u64;
            let data = model.simulate(&[theta0], n, derive_seed(seed, 2 * i))?;
            let target = Target::new(model, &prior, &data)?;
            let draws = sample_posterior(model, &prior, &data, m, derive_seed(seed, 2 * i + 1), &config.sampler)?;
            let report = estimate_delta(&draws, &target, &family, &GFunction::Identity, SensitivityMode::Likelihood)?;
            let ci = report.ci_95[0].ok_or_else(|| {
                Error::UnsupportedConfig("no closed-form interval for this setting".into())
            })?;
            let warnings = report.warnings.iter().map(|w| format!("n = {n}: {w}")).collect();
            Ok((
                ConvergeRow {
                    n,
                    delta: report.delta[0],
                    ci_lo: ci.lo,
                    ci_hi: ci.hi,
                    std_error: report.std_error[0],
                    posterior_mean: report.posterior_mean[0],
                },
                warnings,
            ))
        })
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    let mut warnings = Vec::new();
    for r in rows {
        let (row, w) = r?;
        out.push(row);
        warnings.extend(w);
    }
    let first = &out[0];
    let last = &out[out.len() - 1];
    Ok(ConvergeResult {
        theta0,
        reference: -theta0,
        m,
        seed,
        family: family.name().to_string(),
        width_ratio: (first.ci_hi - first.ci_lo) / (last.ci_hi - last.ci_lo),
        rows: out,
        warnings,
    })
}

impl ConvergeResult {
    /// `converge.csv` with columns `n, delta, ci_lo, ci_hi`, and
    /// `converge.json` with the reference line and standard errors.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_csv(
            &dir.join("converge.csv"),
            &["n", "delta", "ci_lo", "ci_hi"],
            self.rows.iter().map(|r| {
                vec![r.n.to_string(), r.delta.to_string(), r.ci_lo.to_string(), r.ci_hi.to_string()]
            }),
        )?;
        write_json(&dir.join("converge.json"), self)
    }
}
