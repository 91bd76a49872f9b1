use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clt::{clt_available, clt_interval, Interval};
use super::stats::{mc_standard_error, sample_covariance, sample_sd, DEFAULT_BATCHES};
use super::GFunction;
use crate::distortion::{prior_score, score_sum, DistortionFamily};
use crate::error::{Error, Result};
use crate::posterior::{PosteriorDraws, Target};

/// Which distribution function the distortion composes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitivityMode {
    Likelihood,
    Prior,
    Double,
}

impl std::str::FromStr for SensitivityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "likelihood" => Ok(SensitivityMode::Likelihood),
            "prior" => Ok(SensitivityMode::Prior),
            "double" => Ok(SensitivityMode::Double),
            _ => Err(Error::Unknown {
                what: "sensitivity mode",
                name: s.into(),
            }),
        }
    }
}

/// Draws scored per parallel task. Fixed so the reduction order, and with it
/// every bit of the result, does not depend on the thread count.
const SCORE_CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub mode: SensitivityMode,
    pub family: String,
    pub delta: Vec<f64>,
    /// Sample correlation; `None` when either side has zero variance.
    pub delta_normalized: Vec<Option<f64>>,
    pub cs_bound: Vec<f64>,
    pub std_error: Vec<Option<f64>>,
    pub ci_95: Vec<Option<Interval>>,
    #[serde(rename = "M")]
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub g: GFunction,
    pub labels: Vec<String>,
    /// Euclidean norm of `delta`.
    pub delta_norm: f64,
    pub posterior_mean: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SensitivityReport {
    /// Mean of `|delta_j|`.
    pub fn avg_abs_delta(&self) -> f64 {
        self.delta.iter().map(|d| d.abs()).sum::<f64>() / self.delta.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub const CSV_HEADER: [&'static str; 13] = [
        "mode",
        "family",
        "M",
        "n",
        "seed",
        "component",
        "delta",
        "delta_normalized",
        "cs_bound",
        "std_error",
        "ci_lo",
        "ci_hi",
        "posterior_mean",
    ];

    /// One flat record per `g` component, in [`Self::CSV_HEADER`] order.
    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        (0..self.delta.len())
            .map(|j| {
                vec![
                    serde_json::to_value(self.mode).unwrap().as_str().unwrap().to_string(),
                    self.family.clone(),
                    self.m.to_string(),
                    self.n.to_string(),
                    self.seed.to_string(),
                    self.labels[j].clone(),
                    self.delta[j].to_string(),
                    opt(self.delta_normalized[j]),
                    self.cs_bound[j].to_string(),
                    opt(self.std_error[j]),
                    opt(self.ci_95[j].map(|c| c.lo)),
                    opt(self.ci_95[j].map(|c| c.hi)),
                    self.posterior_mean.get(j).map(|v| v.to_string()).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

/// `T(θ)` for every draw: the likelihood score sum, the prior score, or both.
pub fn score_values(
    draws: &PosteriorDraws,
    target: &Target<'_>,
    family: &DistortionFamily,
    mode: SensitivityMode,
) -> Result<Vec<f64>> {
    let k = draws.dim();
    let flat: Vec<&[f64]> = draws.rows().collect();
    let chunks: Vec<Result<Vec<f64>>> = flat
        .par_chunks(SCORE_CHUNK)
        .enumerate()
        .map(|(c, rows)| {
            rows.iter()
                .enumerate()
                .map(|(i, theta)| {
                    debug_assert_eq!(theta.len(), k);
                    let t = match mode {
                        SensitivityMode::Likelihood => score_sum(family, target.model, theta, target.data),
                        SensitivityMode::Prior => prior_score(family, target.prior, theta),
                        SensitivityMode::Double => score_sum(family, target.model, theta, target.data)
                            .and_then(|l| Ok(l + prior_score(family, target.prior, theta)?)),
                    };
                    t.map_err(|e| Error::AtDraw {
                        index: c * SCORE_CHUNK + i,
                        source: Box::new(e),
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(draws.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Local sensitivity as the posterior covariance between `g(θ)` and the
/// distortion score `T(θ)`, estimated from ordinary posterior draws.
pub fn estimate_delta(
    draws: &PosteriorDraws,
    target: &Target<'_>,
    family: &DistortionFamily,
    g: &GFunction,
    mode: SensitivityMode,
) -> Result<SensitivityReport> {
    let m = draws.len();
    if m < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: m });
    }
    target.model.check_theta(draws.row(0))?;
    let t = score_values(draws, target, family, mode)?;
    let columns = g.evaluate(draws)?;
    let sd_t = sample_sd(&t);

    let mut report = SensitivityReport {
        mode,
        family: family.name().to_string(),
        delta: Vec::new(),
        delta_normalized: Vec::new(),
        cs_bound: Vec::new(),
        std_error: Vec::new(),
        ci_95: Vec::new(),
        m,
        n: target.data.n(),
        seed: draws.seed,
        g: *g,
        labels: g.labels(&draws.parameter_names),
        delta_norm: 0.0,
        posterior_mean: draws.mean(),
        warnings: draws.warnings.clone(),
    };
    let theta_hat = report.posterior_mean[0];
    let with_ci = clt_available(target.model, family, mode, g);

    for col in &columns {
        let delta = sample_covariance(col, &t);
        let bound = sample_sd(col) * sd_t;
        let normalized = (bound > 0.0).then(|| (delta / bound).clamp(-1.0, 1.0));
        let se = if m >= DEFAULT_BATCHES {
            Some(mc_standard_error(col, &t)?)
        } else {
            None
        };
        let ci = if with_ci {
            Some(clt_interval(delta, theta_hat, target.data.n().max(1), 0.95)?)
        } else {
            None
        };
        report.delta.push(delta);
        report.delta_normalized.push(normalized);
        report.cs_bound.push(bound);
        report.std_error.push(se);
        report.ci_95.push(ci);
    }
    if report.delta_normalized.iter().any(Option::is_none) {
        report
            .warnings
            .push("normalized sensitivity undefined: zero variance in g or in the score".into());
    }
    report.delta_norm = report.delta.iter().map(|d| d * d).sum::<f64>().sqrt();
    Ok(report)
}
