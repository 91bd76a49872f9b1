use super::{check_admissible, check_unit, Distortion, ScoreContext};
use crate::error::{Error, Result};

/// `h_α(y) = max((y − α)/(1 − α), 0)`, α ∈ [0, 1); identity at α = 0.
///
/// Its score is the constant +1 wherever `F > 0`, so the induced
/// sensitivity is identically zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct CensorLower;

/// `h_α(y) = min(y/α, 1)`, α ∈ (0, 1]; identity at α = 1. Score −1 where `S > 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CensorUpper;

impl Distortion for CensorLower {
    fn name(&self) -> &str {
        "censor-lower"
    }

    fn description(&self) -> &str {
        "censoring distortion truncating the lower tail, h(y) = max((y - alpha)/(1 - alpha), 0)"
    }

    fn identity_alpha(&self) -> f64 {
        0.0
    }

    fn is_admissible(&self, alpha: f64) -> bool {
        (0.0..1.0).contains(&alpha)
    }

    fn distort(&self, alpha: f64, u: f64) -> Result<f64> {
        check_admissible(self, alpha)?;
        check_unit(u)?;
        if alpha == 0.0 {
            return Ok(u);
        }
        Ok(((u - alpha) / (1.0 - alpha)).max(0.0))
    }

    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64> {
        if !(alpha < 1.0) {
            return Err(Error::Domain(format!("censor-lower needs alpha < 1, got {alpha}")));
        }
        // Below the identity point the formula is continued analytically:
        // the slope 1/(1 - alpha) applies on all of (0, 1].
        if ctx.dist.cdf(ctx.x) > alpha {
            Ok(-(-alpha).ln_1p())
        } else {
            Ok(f64::NEG_INFINITY)
        }
    }

    fn score(&self, ctx: &ScoreContext) -> Result<f64> {
        if ctx.dist.ln_cdf(ctx.x).is_finite() {
            Ok(1.0)
        } else {
            Err(Error::ScoreUndefined("F is zero at the observation".into()))
        }
    }
}

impl Distortion for CensorUpper {
    fn name(&self) -> &str {
        "censor-upper"
    }

    fn description(&self) -> &str {
        "censoring distortion truncating the upper tail, h(y) = min(y/alpha, 1)"
    }

    fn identity_alpha(&self) -> f64 {
        1.0
    }

    fn is_admissible(&self, alpha: f64) -> bool {
        alpha > 0.0 && alpha <= 1.0
    }

    fn distort(&self, alpha: f64, u: f64) -> Result<f64> {
        check_admissible(self, alpha)?;
        check_unit(u)?;
        if alpha == 1.0 {
            return Ok(u);
        }
        Ok((u / alpha).min(1.0))
    }

    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("censor-upper needs alpha > 0, got {alpha}")));
        }
        if ctx.dist.cdf(ctx.x) < alpha {
            Ok(-alpha.ln())
        } else {
            Ok(f64::NEG_INFINITY)
        }
    }

    fn score(&self, ctx: &ScoreContext) -> Result<f64> {
        if ctx.dist.ln_survival(ctx.x).is_finite() {
            Ok(-1.0)
        } else {
            Err(Error::ScoreUndefined("S is zero at the observation".into()))
        }
    }
}
