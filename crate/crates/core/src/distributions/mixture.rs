use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::GaussianModel;
use crate::{Error, Genome, Result, RngStream};

/// Finite Gaussian mixture with fixed, non-negative weights summing to one.
#[derive(Clone, Debug)]
pub struct MixtureSpec {
    components: Vec<GaussianModel>,
    weights: Vec<f64>,
}

impl MixtureSpec {
    /// Weights must be non-negative and sum to one within 1e-9; they are
    /// then renormalised so the stored sum is one to rounding.
    pub fn new(components: Vec<GaussianModel>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::arg("mixture needs at least one component"));
        }
        if components.len() != weights.len() {
            return Err(Error::arg(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::arg("mixture components differ in dimension"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::arg(format!("mixture weight {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("mixture weights sum to {total}, not 1")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            components,
            weights,
        })
    }

    pub fn components(&self) -> &[GaussianModel] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// `sum_i w_i N(x; mu_i, Sigma_i)`.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (c, w) in self.components.iter().zip(&self.weights) {
            if *w > 0.0 {
                total += w * c.pdf(x)?;
            }
        }
        Ok(total)
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<(Genome, usize)>> {
        sample_mixture(self, n, rng)
    }
}

/// Draws a component index by weight, then a point from that component.
/// The index is returned with each point so callers can track provenance.
pub fn sample_mixture(mix: &MixtureSpec, n: usize, rng: &mut RngStream) -> Result<Vec<(Genome, usize)>> {
    let picker = WeightedIndex::new(&mix.weights)
        .map_err(|e| Error::arg(format!("invalid mixture weights: {e}")))?;
    // zero-weight components are never drawn, so they are never factorised
    let samplers = mix
        .components
        .iter()
        .zip(&mix.weights)
        .map(|(c, w)| if *w > 0.0 { c.sampler().map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|_| {
            let k = picker.sample(rng);
            let x = samplers[k].as_ref().expect("positive weight").draw(rng);
            (x, k)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_component(w0: f64) -> MixtureSpec {
        MixtureSpec::new(
            vec![
                GaussianModel::diagonal(vec![2.0, 8.0], &[0.2, 1.0]).unwrap(),
                GaussianModel::diagonal(vec![8.0, 2.0], &[1.0, 0.2]).unwrap(),
            ],
            vec![w0, 1.0 - w0],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_weight_uses_one_component() {
        let draws = two_component(1.0).sample(500, &mut RngStream::new(3)).unwrap();
        assert!(draws.iter().all(|(_, k)| *k == 0));
    }

    #[test]
    fn provenance_fractions_follow_weights() {
        let n = 10_000;
        for (w, tol) in [(0.7, 0.014), (0.5, 0.015)] {
            let draws = two_component(w).sample(n, &mut RngStream::new(19)).unwrap();
            let frac = draws.iter().filter(|(_, k)| *k == 0).count() as f64 / n as f64;
            assert!((frac - w).abs() < tol, "w={w}: {frac}");
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let c = GaussianModel::diagonal(vec![0.0], &[1.0]).unwrap();
        assert!(MixtureSpec::new(vec![c.clone(), c.clone()], vec![0.5, 0.6]).is_err());
        assert!(MixtureSpec::new(vec![c.clone(), c.clone()], vec![1.5, -0.5]).is_err());
        assert!(MixtureSpec::new(vec![c.clone()], vec![0.5, 0.5]).is_err());
        assert!(MixtureSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn density_dominates_each_weighted_component() {
        let mix = two_component(0.7);
        for x in [[2.0, 8.0], [5.0, 5.0], [8.0, 2.0], [0.0, 0.0]] {
            let total = mix.pdf(&x).unwrap();
            for (c, w) in mix.components().iter().zip(mix.weights()) {
                assert!(total >= w * c.pdf(&x).unwrap());
            }
        }
    }
}
