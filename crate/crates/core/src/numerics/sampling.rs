//! Random variate generation for the laws used throughout the crate.
//!
//! Thin validated wrappers over `rand_distr`; gamma is correct for
//! shape < 1 (boosting method inside `rand_distr`).

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, StandardNormal};

pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random()
}

pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    let d = Gamma::new(shape, 1.0)
        .map_err(|e| Error::invalid(format!("gamma shape {shape}: {e}")))?;
    Ok(d.sample(rng))
}

pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let d =
        Beta::new(a, b).map_err(|e| Error::invalid(format!("beta({a}, {b}): {e}")))?;
    Ok(d.sample(rng))
}

/// A Dirichlet(1, ..., 1) vector: normalized unit exponentials.
pub fn sample_dirichlet<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::invalid("dirichlet dimension must be >= 1"));
    }
    let mut v: Vec<f64> = (0..dim).map(|_| sample_exponential(rng)).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngFactory;

    #[test]
    fn dirichlet_sums_to_one() {
        let mut rng = RngFactory::new(1).stream(0);
        for dim in [1, 3, 7] {
            let v = sample_dirichlet(dim, &mut rng).unwrap();
            assert_eq!(v.len(), dim);
            let s: f64 = v.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(v.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn invalid_parameters_error() {
        let mut rng = RngFactory::new(1).stream(0);
        assert!(sample_gamma(0.0, &mut rng).is_err());
        assert!(sample_gamma(-1.0, &mut rng).is_err());
        assert!(sample_beta(1.0, 0.0, &mut rng).is_err());
        assert!(sample_dirichlet(0, &mut rng).is_err());
    }

    #[test]
    fn gamma_mean_close_to_shape() {
        let mut rng = RngFactory::new(3).stream(0);
        let n = 200_000;
        let m: f64 = (0..n)
            .map(|_| sample_gamma(2.5, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        // var = 2.5, stderr = sqrt(2.5/n)
        assert!((m - 2.5).abs() < 4.0 * (2.5f64 / n as f64).sqrt(), "mean {m}");
    }
}
