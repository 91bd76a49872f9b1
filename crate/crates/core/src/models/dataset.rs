use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An observed i.i.d. sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub values: Vec<f64>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

impl Dataset {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "observation {} is not finite ({})",
                i + 1,
                values[i]
            )));
        }
        Ok(Dataset {
            values,
            source: source.into(),
            units: None,
        })
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = Some(units.into());
        self
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.n() as f64
    }
}
