use super::{check_admissible, check_unit, Distortion, ScoreContext};
use crate::error::{Error, Result};

/// `h_α(y) = y^α`, α ≥ 1; emphasizes the upper tail.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerCdf;

/// `h_α(y) = 1 − (1 − y)^α`, α ≥ 1; emphasizes the lower tail.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerSurvival;

fn log_h_prime(alpha: f64, ln_y: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("power distortion needs alpha > 0, got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    Ok(alpha.ln() + (alpha - 1.0) * ln_y)
}

fn finite_log(ln_y: f64, what: &str) -> Result<f64> {
    if ln_y.is_finite() {
        Ok(ln_y)
    } else {
        Err(Error::ScoreUndefined(format!("{what} is zero at the observation")))
    }
}

impl Distortion for PowerCdf {
    fn name(&self) -> &str {
        "power-cdf"
    }

    fn description(&self) -> &str {
        "power distortion of the distribution function, h(y) = y^alpha"
    }

    fn identity_alpha(&self) -> f64 {
        1.0
    }

    fn is_admissible(&self, alpha: f64) -> bool {
        alpha.is_finite() && alpha >= 1.0
    }

    fn distort(&self, alpha: f64, u: f64) -> Result<f64> {
        check_admissible(self, alpha)?;
        check_unit(u)?;
        Ok(if alpha == 1.0 { u } else { u.powf(alpha) })
    }

    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64> {
        log_h_prime(alpha, finite_log(ctx.dist.ln_cdf(ctx.x), "F")?)
    }

    fn score(&self, ctx: &ScoreContext) -> Result<f64> {
        Ok(1.0 + finite_log(ctx.dist.ln_cdf(ctx.x), "F")?)
    }
}

impl Distortion for PowerSurvival {
    fn name(&self) -> &str {
        "power-survival"
    }

    fn description(&self) -> &str {
        "power distortion of the survival function, h(y) = 1 - (1 - y)^alpha"
    }

    fn identity_alpha(&self) -> f64 {
        1.0
    }

    fn is_admissible(&self, alpha: f64) -> bool {
        alpha.is_finite() && alpha >= 1.0
    }

    fn distort(&self, alpha: f64, u: f64) -> Result<f64> {
        check_admissible(self, alpha)?;
        check_unit(u)?;
        Ok(if alpha == 1.0 { u } else { 1.0 - (1.0 - u).powf(alpha) })
    }

    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64> {
        log_h_prime(alpha, finite_log(ctx.dist.ln_survival(ctx.x), "S")?)
    }

    fn score(&self, ctx: &ScoreContext) -> Result<f64> {
        Ok(1.0 + finite_log(ctx.dist.ln_survival(ctx.x), "S")?)
    }
}
