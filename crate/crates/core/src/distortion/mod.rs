//! Distortion families and their scores.
//!
//! A distortion `h_α : [0,1] → [0,1]` is composed with a distribution
//! function. Every family reduces, for sensitivity purposes, to its score
//! `∂/∂α log h'_α(F(x)) |_{α=α₀}` evaluated per observation. Families are
//! trait objects looked up by name through [`DistortionRegistry`], so new
//! families can be plugged in without touching the estimators.

mod censor;
mod power;
mod skewing;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use censor::{CensorLower, CensorUpper};
pub use power::{PowerCdf, PowerSurvival};
pub use skewing::Skewing;

use crate::error::{Error, Result};
use crate::models::{Dataset, ParametricModel, ProductPrior, Univariate};

/// One scalar observation together with the distribution it is scored under.
#[derive(Debug, Clone, Copy)]
pub struct ScoreContext {
    pub dist: Univariate,
    pub x: f64,
    pub symmetric_about_zero: bool,
}

impl ScoreContext {
    pub fn new(model: ParametricModel, theta: &[f64], x: f64) -> Result<Self> {
        Ok(ScoreContext {
            dist: model.distribution(theta)?,
            x,
            symmetric_about_zero: model.symmetric_about_zero(),
        })
    }

    /// Context for a prior component evaluated at the parameter value `theta_j`.
    pub fn for_prior(component: Univariate, theta_j: f64) -> Self {
        ScoreContext {
            dist: component,
            x: theta_j,
            symmetric_about_zero: matches!(component, Univariate::Normal { mu, .. } if mu == 0.0),
        }
    }
}

/// A parameterized distortion family.
pub trait Distortion: Send + Sync + fmt::Debug {
    /// Serialized name, e.g. `"power-cdf"`.
    fn name(&self) -> &str;

    fn description(&self) -> &str;

    /// The parameter value at which `h_α` is the identity.
    fn identity_alpha(&self) -> f64;

    fn is_admissible(&self, alpha: f64) -> bool;

    /// `h_α(u)`.
    fn distort(&self, alpha: f64, u: f64) -> Result<f64>;

    /// `log h'_α(F(x))` at `ctx`. `alpha` may fall on either side of the
    /// identity point so that finite differences can straddle it.
    fn log_derivative(&self, alpha: f64, ctx: &ScoreContext) -> Result<f64>;

    /// `∂/∂α log h'_α(F(x)) |_{α=α₀}` for one observation.
    fn score(&self, ctx: &ScoreContext) -> Result<f64>;
}

/// Shared handle to a registered distortion family.
#[derive(Clone)]
pub struct DistortionFamily(Arc<dyn Distortion>);

impl DistortionFamily {
    pub fn new<D: Distortion + 'static>(d: D) -> Self {
        DistortionFamily(Arc::new(d))
    }

    pub fn alpha0(&self) -> f64 {
        self.0.identity_alpha()
    }
}

impl std::ops::Deref for DistortionFamily {
    type Target = dyn Distortion;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for DistortionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistortionFamily({})", self.name())
    }
}

impl fmt::Display for DistortionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for DistortionFamily {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl Serialize for DistortionFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistortionKind {
    PowerCdf,
    PowerSurvival,
    CensorLower,
    CensorUpper,
    Skewing,
}

impl DistortionKind {
    pub const ALL: [DistortionKind; 5] = [
        DistortionKind::PowerCdf,
        DistortionKind::PowerSurvival,
        DistortionKind::CensorLower,
        DistortionKind::CensorUpper,
        DistortionKind::Skewing,
    ];

    pub fn family(self) -> DistortionFamily {
        match self {
            DistortionKind::PowerCdf => DistortionFamily::new(PowerCdf),
            DistortionKind::PowerSurvival => DistortionFamily::new(PowerSurvival),
            DistortionKind::CensorLower => DistortionFamily::new(CensorLower),
            DistortionKind::CensorUpper => DistortionFamily::new(CensorUpper),
            DistortionKind::Skewing => DistortionFamily::new(Skewing),
        }
    }
}

/// Name → family lookup.
#[derive(Debug, Clone, Default)]
pub struct DistortionRegistry {
    families: BTreeMap<String, DistortionFamily>,
}

impl DistortionRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        for kind in DistortionKind::ALL {
            r.register(kind.family());
        }
        r
    }

    /// Registers `family`, replacing any previous entry with the same name.
    pub fn register(&mut self, family: DistortionFamily) -> Option<DistortionFamily> {
        self.families.insert(family.name().to_string(), family)
    }

    pub fn get(&self, name: &str) -> Result<DistortionFamily> {
        self.families.get(name).cloned().ok_or_else(|| Error::Unknown {
            what: "distortion family",
            name: name.to_string(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.families.keys().map(String::as_str)
    }
}

impl FromStr for DistortionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistortionRegistry::builtin().get(s)
    }
}

pub(crate) fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain(format!("u = {u} outside [0, 1]")))
    }
}

pub(crate) fn check_admissible(d: &dyn Distortion, alpha: f64) -> Result<()> {
    if d.is_admissible(alpha) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "alpha = {alpha} is not admissible for {}",
            d.name()
        )))
    }
}

/// `h_α(u)` for `family`.
pub fn distort_cdf(family: &DistortionFamily, alpha: f64, u: f64) -> Result<f64> {
    family.distort(alpha, u)
}

pub fn score(family: &DistortionFamily, ctx: &ScoreContext) -> Result<f64> {
    family.score(ctx)
}

/// Likelihood score `T(θ) = Σᵢ score(xᵢ | θ)`.
pub fn score_sum(
    family: &DistortionFamily,
    model: ParametricModel,
    theta: &[f64],
    data: &Dataset,
) -> Result<f64> {
    let dist = model.distribution(theta)?;
    let symmetric_about_zero = model.symmetric_about_zero();
    let mut total = 0.0;
    for (index, &x) in data.values.iter().enumerate() {
        let ctx = ScoreContext {
            dist,
            x,
            symmetric_about_zero,
        };
        total += family.score(&ctx).map_err(|e| Error::AtObservation {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(total)
}

/// Prior score. The prior is a product of independent components, each
/// distorted through its own distribution function, so the score is the sum
/// of the component scores.
pub fn prior_score(family: &DistortionFamily, prior: &ProductPrior, theta: &[f64]) -> Result<f64> {
    if theta.len() != prior.dim() {
        return Err(Error::DimensionMismatch {
            expected: prior.dim(),
            got: theta.len(),
        });
    }
    prior
        .components
        .iter()
        .zip(theta)
        .map(|(&c, &t)| family.score(&ScoreContext::for_prior(c, t)))
        .sum()
}

/// Sum of `log h'_α` over the observations; the log importance weight of a draw.
pub(crate) fn log_weight_likelihood(
    family: &DistortionFamily,
    alpha: f64,
    model: ParametricModel,
    theta: &[f64],
    data: &Dataset,
) -> Result<f64> {
    let dist = model.distribution(theta)?;
    let symmetric_about_zero = model.symmetric_about_zero();
    data.values
        .iter()
        .map(|&x| {
            family.log_derivative(
                alpha,
                &ScoreContext {
                    dist,
                    x,
                    symmetric_about_zero,
                },
            )
        })
        .sum()
}

pub(crate) fn log_weight_prior(
    family: &DistortionFamily,
    alpha: f64,
    prior: &ProductPrior,
    theta: &[f64],
) -> Result<f64> {
    prior
        .components
        .iter()
        .zip(theta)
        .map(|(&c, &t)| family.log_derivative(alpha, &ScoreContext::for_prior(c, t)))
        .sum()
}
