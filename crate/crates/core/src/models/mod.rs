//! Likelihood families, priors, and observed data.

mod dataset;
mod model;
mod prior;
mod univariate;

pub use dataset::Dataset;
pub use model::{ParametricModel, SufficientStats};
pub use prior::{prior_cdf, ProductPrior};
pub use univariate::{std_normal_density_at_zero, std_normal_quantile, Univariate};
