//! Monte Carlo estimation of the quantizer constant.

use super::{CvpSolver, Lattice, LatticeError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimate {
    pub g: f64,
    pub std_error: f64,
    pub samples: u64,
}

const SHARD: u64 = 1 << 14;

/// Estimate `G` by decoding uniform samples from the fundamental
/// parallelepiped to their nearest lattice point.
///
/// Sampling shards by RNG stream, so the result is deterministic for a
/// given `(samples, seed)` regardless of thread scheduling.
pub fn monte_carlo_g(l: &Lattice, samples: u64, seed: u64) -> Result<MonteCarloEstimate, LatticeError> {
    if samples < 10_000 {
        return Err(LatticeError::Parameter(
            "Monte Carlo needs at least 10^4 samples".into(),
        ));
    }
    let n = l.dim();
    let solver = CvpSolver::new(&l.generator);
    let rows: Vec<Vec<f64>> = (0..n).map(|i| l.generator.row(i).shadow().to_vec()).collect();

    let shards: Vec<u64> = (0..samples.div_ceil(SHARD)).collect();
    let (sum, sum_sq): (f64, f64) = shards
        .par_iter()
        .map(|&shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD.min(samples - shard * SHARD);
            let mut s = 0.0;
            let mut s2 = 0.0;
            let mut x = vec![0.0f64; n];
            for _ in 0..count {
                for xj in x.iter_mut() {
                    *xj = 0.0;
                }
                for row in rows.iter() {
                    let u: f64 = rng.gen();
                    for (xj, rj) in x.iter_mut().zip(row) {
                        *xj += u * rj;
                    }
                }
                let (_, d2) = solver.nearest_float(&x);
                s += d2;
                s2 += d2 * d2;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));

    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    let se_mean = (var / m).sqrt();
    let vol = l.volume().shadow();
    let norm = n as f64 * vol.powf(2.0 / n as f64);
    Ok(MonteCarloEstimate {
        g: mean / norm,
        std_error: se_mean / norm,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    #[test]
    fn z2_estimate_matches_exact_value() {
        let l = catalog::by_name("Z2", None).unwrap();
        let est = monte_carlo_g(&l, 200_000, 7).unwrap();
        assert!(
            (est.g - 1.0 / 12.0).abs() < 3.0 * est.std_error,
            "g = {} ± {}",
            est.g,
            est.std_error
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let l = catalog::by_name("A2", None).unwrap();
        let a = monte_carlo_g(&l, 20_000, 42).unwrap();
        let b = monte_carlo_g(&l, 20_000, 42).unwrap();
        assert_eq!(a.g, b.g);
        let c = monte_carlo_g(&l, 20_000, 43).unwrap();
        assert_ne!(a.g, c.g);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let l = catalog::by_name("Z2", None).unwrap();
        assert!(monte_carlo_g(&l, 100, 1).is_err());
    }
}
