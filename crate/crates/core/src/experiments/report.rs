use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{ensure_dir, format_vector, opt_str, write_csv, write_json, write_text};
use super::{derive_seed, ingest_csv, ingest_csv_positive, ExperimentConfig};
use crate::distortion::DistortionRegistry;
use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel};
use crate::posterior::{sample_posterior, Target};
use crate::sensitivity::{estimate_delta, GFunction, SensitivityMode, SensitivityReport};

pub const DEFAULT_DRAWS: usize = 2000;
pub const DENSITY_GRID_POINTS: usize = 201;

/// Published values for the two reference datasets, by dataset label.
pub fn reference_value(label: &str, model: ParametricModel) -> Option<&'static [f64]> {
    const WINDSHIELD: [&[f64]; 3] = [&[-3.80, -0.97], &[-0.58, 0.28], &[0.25]];
    const EARTHQUAKE: [&[f64]; 3] = [&[-0.60, -0.21], &[-1.66, 0.70], &[0.83]];
    let row = match label.to_ascii_lowercase().as_str() {
        "windshield" => &WINDSHIELD,
        "earthquake" => &EARTHQUAKE,
        _ => return None,
    };
    let col = super::model_select::DEFAULT_MODELS.iter().position(|m| *m == model)?;
    Some(row[col])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: ParametricModel,
    pub report: SensitivityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Normalized so the bars integrate to one.
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurves {
    pub x: Vec<f64>,
    /// Fitted density at the posterior mean, one column per model.
    pub curves: Vec<(ParametricModel, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportResult {
    pub label: String,
    pub source: String,
    pub units: Option<String>,
    pub n: usize,
    pub seed: u64,
    pub reports: Vec<ModelReport>,
    pub histogram: Histogram,
    pub densities: DensityCurves,
}

/// Reads the configured dataset, rejecting non-positive values when any
/// configured model has positive support.
pub fn load_dataset(config: &ExperimentConfig, models: &[ParametricModel]) -> Result<Dataset> {
    let ds = config
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("no [dataset] section".into()))?;
    let path = config.dataset_path().unwrap_or_else(|| ds.path.clone());
    let data = if models.iter().any(|m| m.positive_support()) {
        ingest_csv_positive(&path, ds.column.as_deref())?
    } else {
        ingest_csv(&path, ds.column.as_deref())?
    };
    Ok(match &ds.units {
        Some(u) => data.with_units(u),
        None => data,
    })
}

/// Fits each configured model to a dataset and reports its sensitivity,
/// plus histogram and fitted-density series for plotting.
pub fn run_report(config: &ExperimentConfig) -> Result<ReportResult> {
    let seed = config.seed()?;
    let m = config.draws_or(DEFAULT_DRAWS)?;
    let models = config.models_or(&super::model_select::DEFAULT_MODELS)?;
    let family = config.family_in(&DistortionRegistry::builtin(), "power-cdf")?;
    let g = config.g.unwrap_or(GFunction::Identity);
    let mode = config.mode.unwrap_or(SensitivityMode::Likelihood);
    let data = load_dataset(config, &models)?;
    if data.n() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: data.n(),
        });
    }
    let label = config
        .dataset
        .as_ref()
        .and_then(|d| d.label.clone())
        .unwrap_or_else(|| data.source.clone());

    let reports = models
        .par_iter()
        .enumerate()
        .map(|(i, &model)| {
            let prior = config.prior_for(model)?;
            let target = Target::new(model, &prior, &data)?;
            let draws = sample_posterior(model, &prior, &data, m, derive_seed(seed, i as u64), &config.sampler)?;
            let report = estimate_delta(&draws, &target, &family, &g, mode)?;
            Ok(ModelReport { model, report })
        })
        .collect::<Result<Vec<_>>>()?;

    let bins = config
        .histogram_bins
        .unwrap_or_else(|| ((data.n() as f64).sqrt().ceil() as usize).clamp(5, 50));
    let positive = models.iter().all(|m| m.positive_support());
    let histogram = histogram(&data.values, bins, positive);
    let densities = density_curves(&reports, &histogram)?;
    Ok(ReportResult {
        label,
        source: data.source.clone(),
        units: data.units.clone(),
        n: data.n(),
        seed,
        reports,
        histogram,
        densities,
    })
}

fn histogram(values: &[f64], bins: usize, from_zero: bool) -> Histogram {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = if from_zero { 0.0 } else { min };
    let hi = if max > lo { max } else { lo + 1.0 };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let scale = 1.0 / (values.len() as f64 * width);
    Histogram {
        edges,
        density: counts.iter().map(|&c| c as f64 * scale).collect(),
    }
}

fn density_curves(reports: &[ModelReport], h: &Histogram) -> Result<DensityCurves> {
    let lo = h.edges[0];
    let hi = h.edges[h.edges.len() - 1] * 1.05;
    let step = (hi - lo) / (DENSITY_GRID_POINTS - 1) as f64;
    // The first point sits a small step off the left edge, where some
    // positive-support densities are unbounded.
    let x: Vec<f64> = (0..DENSITY_GRID_POINTS)
        .map(|i| if i == 0 { lo + 1e-3 * step } else { lo + step * i as f64 })
        .collect();
    let curves = reports
        .iter()
        .map(|r| {
            let dist = r.model.distribution(&r.report.posterior_mean)?;
            Ok((r.model, x.iter().map(|&v| dist.pdf(v)).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityCurves { x, curves })
}

impl ReportResult {
    pub fn format_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (n = {}, seed = {})", self.label, self.n, self.seed);
        for r in &self.reports {
            let _ = write!(s, "{:<14}{:>22}", r.model.name(), format_vector(&r.report.delta));
            if let Some(v) = reference_value(&self.label, r.model) {
                let _ = write!(s, "   reference, not oracle: {}", format_vector(v));
            }
            s.push('\n');
            for w in &r.report.warnings {
                let _ = writeln!(s, "warning [{}]: {w}", r.model.name());
            }
        }
        s
    }

    /// `report_<model>.json` per model, `report.csv`, `report.txt`,
    /// `histogram.csv` and `density.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        let mut rows = Vec::new();
        for r in &self.reports {
            write_json(&dir.join(format!("report_{}.json", r.model.name())), &r.report)?;
            for j in 0..r.report.delta.len() {
                rows.push(vec![
                    self.label.clone(),
                    r.model.name().to_string(),
                    r.report.labels[j].clone(),
                    r.report.delta[j].to_string(),
                    opt_str(r.report.std_error[j]),
                    opt_str(r.report.delta_normalized[j]),
                    r.report.avg_abs_delta().to_string(),
                    r.report.posterior_mean.get(j).map(|v| v.to_string()).unwrap_or_default(),
                ]);
            }
        }
        write_csv(
            &dir.join("report.csv"),
            &[
                "dataset",
                "model",
                "component",
                "delta",
                "std_error",
                "delta_normalized",
                "avg_abs_delta",
                "posterior_mean",
            ],
            rows,
        )?;
        write_csv(
            &dir.join("histogram.csv"),
            &["bin_lo", "bin_hi", "density"],
            self.histogram.density.iter().enumerate().map(|(i, d)| {
                vec![
                    self.histogram.edges[i].to_string(),
                    self.histogram.edges[i + 1].to_string(),
                    d.to_string(),
                ]
            }),
        )?;
        let mut header = vec!["x"];
        header.extend(self.densities.curves.iter().map(|(m, _)| m.name()));
        write_csv(
            &dir.join("density.csv"),
            &header,
            self.densities.x.iter().enumerate().map(|(i, x)| {
                std::iter::once(x.to_string())
                    .chain(self.densities.curves.iter().map(|(_, c)| c[i].to_string()))
                    .collect::<Vec<_>>()
            }),
        )?;
        write_text(&dir.join("report.txt"), &self.format_table())
    }
}
