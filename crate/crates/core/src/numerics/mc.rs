//! Monte Carlo driver with batch-means standard errors.

use crate::error::{Error, Result};
use crate::numerics::rng::{mix_seed, RngFactory, DEFAULT_SEED};
use rand_chacha::ChaCha12Rng;

/// Sample budget and seeding for a Monte Carlo estimate.
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Batch count for batch-means standard errors.
    pub n_batches: usize,
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            n_samples,
            seed,
            n_batches: 32,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::invalid("n_samples must be >= 2"));
        }
        if self.n_batches < 2 {
            return Err(Error::invalid("n_batches must be >= 2"));
        }
        if self.n_samples < self.n_batches {
            return Err(Error::invalid(
                "n_samples must be at least n_batches",
            ));
        }
        Ok(())
    }

    /// Deterministically derived configuration for a sub-computation, so
    /// that independent estimates inside one run never share a stream.
    pub fn derived(&self, tag: u64) -> McConfig {
        McConfig {
            seed: mix_seed(self.seed, tag),
            ..*self
        }
    }

    pub fn with_samples(mut self, n: usize) -> McConfig {
        self.n_samples = n;
        self
    }

    /// Samples per batch after deterministic truncation.
    pub fn batch_size(&self) -> usize {
        self.n_samples / self.n_batches
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 1_000_000,
            seed: DEFAULT_SEED,
            n_batches: 32,
        }
    }
}

/// A Monte Carlo mean with its batch-means standard error.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub warning: Option<String>,
}

impl McEstimate {
    pub fn exact(value: f64) -> McEstimate {
        McEstimate {
            mean: value,
            std_error: 0.0,
            n_samples: 0,
            warning: None,
        }
    }
}

/// Combine per-batch means into an estimate.
pub(crate) fn from_batch_means(batch_means: &[f64], n_samples: usize) -> McEstimate {
    let b = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / b;
    let var = batch_means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1.0);
    McEstimate {
        mean,
        std_error: (var / b).sqrt(),
        n_samples,
        warning: None,
    }
}

/// Batch-means Monte Carlo mean of `sampler` under the configured budget.
/// Batch `b` draws from sub-stream `b`; fixed seed gives bit-identical
/// results on one platform.
pub fn mc_mean<F: FnMut(&mut ChaCha12Rng) -> f64>(
    mut sampler: F,
    cfg: &McConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    let factory = RngFactory::new(cfg.seed);
    let per_batch = cfg.batch_size();
    let mut batch_means = Vec::with_capacity(cfg.n_batches);
    for b in 0..cfg.n_batches {
        let mut rng = factory.stream(b as u64);
        let mut acc = 0.0;
        for _ in 0..per_batch {
            acc += sampler(&mut rng);
        }
        batch_means.push(acc / per_batch as f64);
    }
    Ok(from_batch_means(&batch_means, per_batch * cfg.n_batches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sampling::sample_uniform;

    #[test]
    fn constant_sampler_has_zero_error() {
        let est = mc_mean(|_| 1.0, &McConfig::new(1000, 1).unwrap()).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn uniform_mean_is_half() {
        let cfg = McConfig::new(1_000_000, 42).unwrap();
        let est = mc_mean(|rng| sample_uniform(rng), &cfg).unwrap();
        assert!((est.mean - 0.5).abs() < 3.0 * est.std_error, "{est:?}");
        assert!(est.std_error > 0.0 && est.std_error < 1e-3);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let cfg = McConfig::new(10_000, 9).unwrap();
        let a = mc_mean(|rng| sample_uniform(rng), &cfg).unwrap();
        let b = mc_mean(|rng| sample_uniform(rng), &cfg).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn too_few_batches_rejected() {
        assert!(McConfig::new(1, 0).is_err());
        let mut cfg = McConfig::new(100, 0).unwrap();
        cfg.n_batches = 1;
        assert!(mc_mean(|_| 0.0, &cfg).is_err());
    }
}
