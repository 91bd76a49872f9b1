//! Local sensitivity estimates from ordinary posterior draws.

mod clt;
mod estimate;
mod fd;
mod gfunction;
mod stats;

pub use clt::{clt_available, clt_interval, Interval};
pub use estimate::{estimate_delta, score_values, SensitivityMode, SensitivityReport};
pub use fd::{finite_difference_check, FiniteDifferenceCheck};
pub use gfunction::GFunction;
pub use stats::{batch_standard_error, mc_standard_error, sample_covariance, sample_sd, DEFAULT_BATCHES};
