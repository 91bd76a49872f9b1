use crate::error::{Error, Result};

pub const DEFAULT_BATCHES: usize = 20;

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample covariance with `1/(M−1)` normalization, computed on centered values.
pub fn sample_covariance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() - 1) as f64
}

pub fn sample_sd(a: &[f64]) -> f64 {
    sample_covariance(a, a).sqrt()
}

/// Monte Carlo standard error of the sample covariance of `g` and `t` by
/// non-overlapping batch means (20 batches), which tolerates autocorrelated
/// sampler output. Trailing draws that do not fill a batch are ignored.
pub fn mc_standard_error(g_values: &[f64], t_values: &[f64]) -> Result<f64> {
    batch_standard_error(g_values, t_values, DEFAULT_BATCHES)
}

pub fn batch_standard_error(g: &[f64], t: &[f64], batches: usize) -> Result<f64> {
    if g.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: t.len(),
        });
    }
    if batches < 2 || g.len() < batches {
        return Err(Error::InsufficientSamples {
            needed: batches.max(2),
            got: g.len(),
        });
    }
    let (mg, mt) = (mean(g), mean(t));
    let size = g.len() / batches;
    let batch_means: Vec<f64> = (0..batches)
        .map(|b| {
            let r = b * size..(b + 1) * size;
            g[r.clone()]
                .iter()
                .zip(&t[r])
                .map(|(x, y)| (x - mg) * (y - mt))
                .sum::<f64>()
                / size as f64
        })
        .collect();
    Ok(sample_sd(&batch_means) / (batches as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_t_has_zero_error() {
        let g: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let t = vec![3.0; 100];
        assert_eq!(mc_standard_error(&g, &t).unwrap(), 0.0);
    }

    #[test]
    fn identical_batches_have_zero_error() {
        // Period equal to the batch length: every batch mean is the same.
        let g: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let t: Vec<f64> = (0..40).map(|i| (i % 2) as f64 * 2.0).collect();
        assert_eq!(mc_standard_error(&g, &t).unwrap(), 0.0);
    }

    #[test]
    fn too_few_draws() {
        let v = vec![1.0; 19];
        assert!(matches!(mc_standard_error(&v, &v), Err(Error::InsufficientSamples { needed: 20, got: 19 })));
    }

    #[test]
    fn batch_error_matches_iid_formula() {
        // Unit-variance Gaussian pairs with correlation rho: Var(XY) = 1 + rho².
        let m = 100_000;
        let rho: f64 = 0.6;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (mut g, mut t) = (Vec::with_capacity(m), Vec::with_capacity(m));
        for _ in 0..m {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            g.push(a);
            t.push(rho * a + (1.0 - rho * rho).sqrt() * b);
        }
        let iid = ((1.0 + rho * rho) / m as f64).sqrt();
        let batch = mc_standard_error(&g, &t).unwrap();
        let ratio = batch / iid;
        assert!((1.0 / 1.5..=1.5).contains(&ratio), "ratio {ratio}");
    }
}
