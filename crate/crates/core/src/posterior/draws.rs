use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    ConjugateGammaExponential,
    RandomWalkMetropolis,
}

/// `M × k` matrix of posterior draws plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    dim: usize,
    values: Vec<f64>,
    pub parameter_names: Vec<String>,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub chain_count: usize,
    pub acceptance_rate: Option<f64>,
    pub burn_in: usize,
    pub thinning: usize,
    /// Sampler diagnostics that did not abort the run.
    pub warnings: Vec<String>,
}

impl PosteriorDraws {
    /// Builds a draw matrix from rows; used by samplers and by callers that
    /// bring draws from elsewhere.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        parameter_names: Vec<String>,
        seed: u64,
        sampler: SamplerKind,
    ) -> Result<Self> {
        let dim = parameter_names.len();
        if rows.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(PosteriorDraws {
            dim,
            values,
            parameter_names,
            seed,
            sampler,
            chain_count: 1,
            acceptance_rate: None,
            burn_in: 0,
            thinning: 1,
            warnings: Vec::new(),
        })
    }

    pub(crate) fn from_flat(
        dim: usize,
        values: Vec<f64>,
        parameter_names: Vec<String>,
        seed: u64,
        sampler: SamplerKind,
    ) -> Result<Self> {
        debug_assert_eq!(values.len() % dim, 0);
        let m = values.len() / dim;
        if m < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: m });
        }
        Ok(PosteriorDraws {
            dim,
            values,
            parameter_names,
            seed,
            sampler,
            chain_count: 1,
            acceptance_rate: None,
            burn_in: 0,
            thinning: 1,
            warnings: Vec::new(),
        })
    }

    /// Number of draws `M`.
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.values[m * self.dim..(m + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Componentwise sample mean.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| self.rows().map(|r| r[j]).sum::<f64>() / self.len() as f64)
            .collect()
    }

    /// One draw per row, header from the parameter names.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.parameter_names)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(|e| Error::io("<draws csv>", e))?;
        Ok(())
    }
}
