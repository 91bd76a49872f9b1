use super::{Distortion, ScoreContext};
use crate::error::{Error, Result};

/// Azzalini-type skewing of a model symmetric about zero: the distorted
/// density is `2 f(x) F(αx)`, identity at α = 0.
///
/// The distortion depends on the model itself, so [`Distortion::distort`]
/// is not available on the unit interval alone.
#[derive(Debug, Clone, Copy, Default)]
pub struct Skewing;

fn require_symmetric(ctx: &ScoreContext) -> Result<()> {
    if ctx.symmetric_about_zero {
        Ok(())
    } else {
        Err(Error::ModelContract(
            "skewing distortion requires a model symmetric about 0".into(),
        ))
    }
}

impl Distortion for Skewing {
    fn name(&self) -> &str {
        "skewing"
    }

    fn description(&self) -> &str {
        "skewing distortion, distorted density 2 f(x) F(alpha x)"
    }

    fn identity_alpha(&self) -> f64 {
        0.0
    }

    fn is_admissible(&self, alpha: f64) -> bool {
        alpha.is_finite()
    }

    fn distort(&self, _alpha: f64, _u: f64) -> Result<f64> {
        Err(Error::UnsupportedKind(
            self.name().into(),
            "the skewing map depends on the model; it has no model-free form on [0, 1]".into(),
        ))
    }

    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64> {
        require_symmetric(ctx)?;
        Ok(std::f64::consts::LN_2 + ctx.dist.ln_cdf(alpha * ctx.x))
    }

    fn score(&self, ctx: &ScoreContext) -> Result<f64> {
        require_symmetric(ctx)?;
        Ok(2.0 * ctx.dist.pdf(0.0) * ctx.x)
    }
}
