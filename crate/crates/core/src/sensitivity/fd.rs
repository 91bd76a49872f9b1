use super::{estimate_delta, GFunction, SensitivityMode};
use crate::distortion::DistortionFamily;
use crate::error::{Error, Result};
use crate::posterior::{distorted_expectation_reweighted, PosteriorDraws, Target};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDifferenceCheck {
    /// Central difference of reweighted distorted expectations.
    pub delta_fd: Vec<f64>,
    /// Covariance estimate from the same draws.
    pub delta_cov: Vec<f64>,
    /// Batch-means standard error of `delta_cov`, when available.
    pub std_error: Vec<Option<f64>>,
    /// Delta-method standard error of `delta_fd`.
    pub fd_std_error: Vec<f64>,
}

/// Differentiates the distorted posterior expectation numerically, reusing
/// the same draws on both sides of the identity point, and returns it next
/// to the covariance estimate for comparison.
pub fn finite_difference_check(
    draws: &PosteriorDraws,
    target: &Target<'_>,
    family: &DistortionFamily,
    g: &GFunction,
    epsilon: f64,
    mode: SensitivityMode,
) -> Result<FiniteDifferenceCheck> {
    if !(1e-6..=1e-2).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} outside [1e-6, 1e-2]"
        )));
    }
    let a0 = family.alpha0();
    let up = distorted_expectation_reweighted(draws, target, family, a0 + epsilon, g, mode)?;
    let down = distorted_expectation_reweighted(draws, target, family, a0 - epsilon, g, mode)?;
    let delta_fd = up
        .values
        .iter()
        .zip(&down.values)
        .map(|(u, d)| (u - d) / (2.0 * epsilon))
        .collect();
    let report = estimate_delta(draws, target, family, g, mode)?;
    // The reweighted estimator at α₀ ± ε has error ≈ ε·sd(g)·sd(T)/√M on each
    // side; the difference quotient inherits roughly the covariance SE.
    let fd_std_error = report.std_error.iter().zip(&report.cs_bound).map(|(se, b)| {
        se.unwrap_or(b / (draws.len() as f64).sqrt())
    }).collect();
    Ok(FiniteDifferenceCheck {
        delta_fd,
        delta_cov: report.delta,
        std_error: report.std_error,
        fd_std_error,
    })
}
