use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Genome, Result, RngStream, SearchSpace};

/// Adds `N(0, sigma_i^2)` noise to each gene with probability
/// `per_gene_prob`, then clips into `space`.
pub fn gaussian_mutate(
    genome: &[f64],
    sigma: &[f64],
    per_gene_prob: f64,
    space: &SearchSpace,
    rng: &mut RngStream,
) -> Result<Genome> {
    if sigma.len() != genome.len() {
        return Err(Error::arg(format!(
            "sigma has length {}, genome has length {}",
            sigma.len(),
            genome.len()
        )));
    }
    if let Some(s) = sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::arg(format!("mutation sigma must be positive, got {s}")));
    }
    if !(0.0..=1.0).contains(&per_gene_prob) {
        return Err(Error::arg(format!(
            "mutation probability must lie in [0, 1], got {per_gene_prob}"
        )));
    }
    space.check_len(genome)?;
    let mut out: Genome = genome
        .iter()
        .zip(sigma)
        .map(|(&g, &s)| {
            if per_gene_prob > 0.0 && rng.random::<f64>() < per_gene_prob {
                let z: f64 = rng.sample(StandardNormal);
                g + s * z
            } else {
                g
            }
        })
        .collect();
    space.clip(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> SearchSpace {
        SearchSpace::cube(3, -100.0, 100.0).unwrap()
    }

    #[test]
    fn zero_probability_is_identity() {
        let mut rng = RngStream::new(0);
        let g = vec![1.0, -2.0, 3.5];
        let out = gaussian_mutate(&g, &[1.0; 3], 0.0, &space(), &mut rng).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn vanishing_sigma_is_identity() {
        let mut rng = RngStream::new(0);
        let g = vec![1.0, -2.0, 3.5];
        let out = gaussian_mutate(&g, &[1e-300; 3], 1.0, &space(), &mut rng).unwrap();
        for (a, b) in out.iter().zip(&g) {
            assert!((a - b).abs() <= f64::EPSILON * b.abs());
        }
    }

    #[test]
    fn empirical_std_matches_mixture_variance() {
        // Var(delta) = p * sigma^2 for the zero-mean mixture of N(0, sigma^2) and a point mass.
        let mut rng = RngStream::new(21);
        let sigma = [0.5, 2.0, 1.0];
        let p = 0.3;
        let n = 100_000;
        let g = vec![0.0; 3];
        let mut sumsq = [0.0f64; 3];
        for _ in 0..n {
            let out = gaussian_mutate(&g, &sigma, p, &space(), &mut rng).unwrap();
            for i in 0..3 {
                sumsq[i] += out[i] * out[i];
            }
        }
        for i in 0..3 {
            let sd = (sumsq[i] / n as f64).sqrt();
            let expected = sigma[i] * p.sqrt();
            assert!((sd / expected - 1.0).abs() < 0.03, "dim {i}: {sd} vs {expected}");
        }
    }

    #[test]
    fn rejects_bad_sigma() {
        let mut rng = RngStream::new(0);
        assert!(gaussian_mutate(&[0.0; 3], &[1.0, 0.0, 1.0], 0.5, &space(), &mut rng).is_err());
        assert!(gaussian_mutate(&[0.0; 3], &[1.0; 2], 0.5, &space(), &mut rng).is_err());
    }
}
