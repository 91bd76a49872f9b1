use super::{PosteriorDraws, Target};
use crate::distortion::{log_weight_likelihood, log_weight_prior, DistortionFamily};
use crate::error::{Error, Result};
use crate::sensitivity::{GFunction, SensitivityMode};

/// Self-normalized importance estimate of a distorted-posterior expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightedEstimate {
    /// `E_{Π_{h_α}}[g_j]` per component of `g`.
    pub values: Vec<f64>,
    /// Delta-method standard error of each component.
    pub std_error: Vec<f64>,
    /// Kish effective sample size of the weights.
    pub ess: f64,
    pub warnings: Vec<String>,
}

fn log_weight(
    draws_row: &[f64],
    target: &Target<'_>,
    family: &DistortionFamily,
    alpha: f64,
    mode: SensitivityMode,
) -> Result<f64> {
    let lik = || log_weight_likelihood(family, alpha, target.model, draws_row, target.data);
    let pri = || log_weight_prior(family, alpha, target.prior, draws_row);
    match mode {
        SensitivityMode::Likelihood => lik(),
        SensitivityMode::Prior => pri(),
        SensitivityMode::Double => Ok(lik()? + pri()?),
    }
}

/// Reweights ordinary posterior draws by `∏ h'_α(F(xᵢ|θ))` (and/or the
/// prior analogue, per `mode`) to estimate `E[g]` under the distorted
/// posterior without sampling it. Weights are built in log space and shifted
/// by their maximum before exponentiation.
pub fn distorted_expectation_reweighted(
    draws: &PosteriorDraws,
    target: &Target<'_>,
    family: &DistortionFamily,
    alpha: f64,
    g: &GFunction,
    mode: SensitivityMode,
) -> Result<ReweightedEstimate> {
    let log_w = draws
        .rows()
        .enumerate()
        .map(|(index, row)| {
            log_weight(row, target, family, alpha, mode).map_err(|e| Error::AtDraw {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if log_w.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::DegenerateWeights("non-finite log weight".into()));
    }
    let shift = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::DegenerateWeights("every weight is zero".into()));
    }
    let w: Vec<f64> = log_w.iter().map(|l| (l - shift).exp()).collect();
    let sum_w: f64 = w.iter().sum();
    let sum_w2: f64 = w.iter().map(|v| v * v).sum();
    let ess = sum_w * sum_w / sum_w2;

    let columns = g.evaluate(draws)?;
    let mut values = Vec::with_capacity(columns.len());
    let mut std_error = Vec::with_capacity(columns.len());
    for col in &columns {
        let num: f64 = w.iter().zip(col).map(|(wi, gi)| wi * gi).sum();
        let mean = num / sum_w;
        let var: f64 = w
            .iter()
            .zip(col)
            .map(|(wi, gi)| (wi * (gi - mean)).powi(2))
            .sum::<f64>();
        values.push(mean);
        std_error.push(var.sqrt() / sum_w);
    }
    let mut warnings = Vec::new();
    if ess < 10.0 {
        warnings.push(format!("effective sample size {ess:.2} is below 10"));
    }
    Ok(ReweightedEstimate {
        values,
        std_error,
        ess,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::DistortionKind;
    use crate::models::{Dataset, ParametricModel, ProductPrior, Univariate};
    use crate::posterior::{conjugate_gamma_exponential, sample_posterior, SamplerConfig, SamplerKind};

    fn setup(m: usize) -> (ProductPrior, Dataset, PosteriorDraws) {
        let prior = ProductPrior::new(vec![Univariate::gamma(1.0, 1.0).unwrap()]).unwrap();
        let data = Dataset::new(vec![1.0, 1.0], "t").unwrap();
        let draws = sample_posterior(ParametricModel::Exponential, &prior, &data, m, 17, &SamplerConfig::default()).unwrap();
        (prior, data, draws)
    }

    #[test]
    fn identity_alpha_reproduces_plain_mean_exactly() {
        let (prior, data, draws) = setup(5000);
        let target = Target::new(ParametricModel::Exponential, &prior, &data).unwrap();
        let col = draws.column(0);
        let plain = col.iter().sum::<f64>() / col.len() as f64;
        for kind in [DistortionKind::PowerCdf, DistortionKind::PowerSurvival, DistortionKind::CensorLower, DistortionKind::CensorUpper] {
            let f = kind.family();
            for mode in [SensitivityMode::Likelihood, SensitivityMode::Prior, SensitivityMode::Double] {
                let est = distorted_expectation_reweighted(&draws, &target, &f, f.alpha0(), &GFunction::Identity, mode).unwrap();
                assert_eq!(est.values[0].to_bits(), plain.to_bits(), "{kind:?} {mode:?}");
                assert_eq!(est.ess, 5000.0);
            }
        }
    }

    #[test]
    fn constant_g_gives_one() {
        let rows: Vec<Vec<f64>> = (0..50).map(|_| vec![1.0]).collect();
        let draws = PosteriorDraws::from_rows(rows, vec!["rate".into()], 0, SamplerKind::ConjugateGammaExponential).unwrap();
        let (prior, data, _) = setup(10);
        let target = Target::new(ParametricModel::Exponential, &prior, &data).unwrap();
        let f = DistortionKind::PowerSurvival.family();
        let est = distorted_expectation_reweighted(&draws, &target, &f, 1.7, &GFunction::Identity, SensitivityMode::Likelihood).unwrap();
        assert_eq!(est.values[0], 1.0);
    }

    #[test]
    fn matches_closed_form_distorted_posterior() {
        let (prior, data, draws) = setup(100_000);
        let target = Target::new(ParametricModel::Exponential, &prior, &data).unwrap();
        let f = DistortionKind::PowerSurvival.family();
        let est = distorted_expectation_reweighted(&draws, &target, &f, 1.5, &GFunction::Identity, SensitivityMode::Likelihood).unwrap();
        let exact = conjugate_gamma_exponential(1.0, 1.0, &data, 1.5).unwrap().mean();
        assert!((exact - 0.75).abs() < 1e-15);
        assert!((est.values[0] - exact).abs() < 3.0 * est.std_error[0], "{} vs {exact} (se {})", est.values[0], est.std_error[0]);
    }

    #[test]
    fn degenerate_weights_detected() {
        // Censoring far above every observation's CDF zeroes all weights.
        let (prior, _, draws) = setup(100);
        let data = Dataset::new(vec![1e-6], "t").unwrap();
        let target = Target::new(ParametricModel::Exponential, &prior, &data).unwrap();
        let f = DistortionKind::CensorLower.family();
        assert!(matches!(
            distorted_expectation_reweighted(&draws, &target, &f, 0.9, &GFunction::Identity, SensitivityMode::Likelihood),
            Err(Error::DegenerateWeights(_))
        ));
    }

    #[test]
    fn small_ess_warns() {
        let (prior, _, draws) = setup(200);
        let data = ParametricModel::Exponential.simulate(&[1.0], 2000, 1).unwrap();
        let target = Target::new(ParametricModel::Exponential, &prior, &data).unwrap();
        let f = DistortionKind::PowerSurvival.family();
        let est = distorted_expectation_reweighted(&draws, &target, &f, 3.0, &GFunction::Identity, SensitivityMode::Likelihood).unwrap();
        assert!(est.ess < 10.0);
        assert_eq!(est.warnings.len(), 1);
    }
}
