use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::posterior::PosteriorDraws;

/// The posterior functional whose distorted expectation is differentiated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GFunction {
    /// Every parameter component.
    Identity,
    /// A single component, 1-based.
    Component(usize),
    /// Indicator of the equal-tailed `(1 − γ)` credible box built from the
    /// same draws: every component inside its marginal interval.
    CredibleSetIndicator(f64),
}

impl GFunction {
    pub fn output_dim(&self, k: usize) -> usize {
        match self {
            GFunction::Identity => k,
            GFunction::Component(_) | GFunction::CredibleSetIndicator(_) => 1,
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match *self {
            GFunction::Identity => Ok(()),
            GFunction::Component(j) if (1..=k).contains(&j) => Ok(()),
            GFunction::Component(j) => Err(Error::Domain(format!(
                "component {j} outside 1..={k}"
            ))),
            GFunction::CredibleSetIndicator(gamma) if gamma > 0.0 && gamma < 1.0 => Ok(()),
            GFunction::CredibleSetIndicator(gamma) => Err(Error::Domain(format!(
                "credible-set level gamma = {gamma} outside (0, 1)"
            ))),
        }
    }

    /// Output labels, given the parameter names.
    pub fn labels(&self, names: &[String]) -> Vec<String> {
        match *self {
            GFunction::Identity => names.to_vec(),
            GFunction::Component(j) => vec![names.get(j - 1).cloned().unwrap_or_else(|| format!("theta{j}"))],
            GFunction::CredibleSetIndicator(gamma) => vec![format!("credible{}", 1.0 - gamma)],
        }
    }

    /// `g(θ⁽ᵐ⁾)` as one column of length `M` per output component.
    pub fn evaluate(&self, draws: &PosteriorDraws) -> Result<Vec<Vec<f64>>> {
        let k = draws.dim();
        self.validate(k)?;
        Ok(match *self {
            GFunction::Identity => (0..k).map(|j| draws.column(j)).collect(),
            GFunction::Component(j) => vec![draws.column(j - 1)],
            GFunction::CredibleSetIndicator(gamma) => {
                let bounds: Vec<(f64, f64)> = (0..k)
                    .map(|j| {
                        let mut col = draws.column(j);
                        col.sort_by(f64::total_cmp);
                        (
                            empirical_quantile(&col, gamma / 2.0),
                            empirical_quantile(&col, 1.0 - gamma / 2.0),
                        )
                    })
                    .collect();
                let ind = draws
                    .rows()
                    .map(|r| {
                        let inside = r.iter().zip(&bounds).all(|(v, (lo, hi))| v >= lo && v <= hi);
                        if inside {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                vec![ind]
            }
        })
    }
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl fmt::Display for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GFunction::Identity => f.write_str("identity"),
            GFunction::Component(j) => write!(f, "component:{j}"),
            GFunction::CredibleSetIndicator(g) => write!(f, "credible:{g}"),
        }
    }
}

impl FromStr for GFunction {
    type Err = Error;

    /// `identity`, `component:<j>`, or `credible:<gamma>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse g-function `{s}`"));
        match s.split_once(':') {
            None if s == "identity" => Ok(GFunction::Identity),
            Some(("component", j)) => Ok(GFunction::Component(j.parse().map_err(|_| bad())?)),
            Some(("credible", g)) => Ok(GFunction::CredibleSetIndicator(g.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
