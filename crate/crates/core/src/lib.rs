//! Bayesian local sensitivity to distortions of the likelihood or the prior.
//!
//! A distortion family composes a monotone map `h_α` of the unit interval
//! with a distribution function. The local sensitivity of a posterior
//! expectation `E[g(θ)]` at the identity point equals the posterior
//! covariance of `g(θ)` with the distortion score, which is what
//! [`sensitivity::estimate_delta`] computes from ordinary posterior draws.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distortion;
pub mod error;
pub mod experiments;
pub mod models;
pub mod posterior;
pub mod sensitivity;

pub use distortion::{DistortionFamily, DistortionKind, DistortionRegistry};
pub use error::{Error, Result};
pub use models::{Dataset, ParametricModel, ProductPrior, Univariate};
pub use posterior::{sample_posterior, PosteriorDraws, SamplerConfig, Target};
pub use sensitivity::{estimate_delta, GFunction, SensitivityMode, SensitivityReport};
