use crate::distributions::{product_of_gaussians, sample_mixture, GaussianModel, MixtureSpec, ProductSpec};
use crate::{Error, Genome, Result, RngStream};

/// Where a sampled offspring came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// The model of task `i`.
    Task(usize),
    /// The product component of subset `n` in [`enumerate_product_subsets`]
    /// order.
    Product(usize),
}

/// All subsets of `{0, .., k-1}` with at least two members, ordered by size
/// and then lexicographically. There are `2^k - k - 1` of them.
pub fn enumerate_product_subsets(k: usize) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::arg(format!("product subsets need at least two tasks, got {k}")));
    }
    if k > 20 {
        return Err(Error::arg(format!("{k} tasks give too many product subsets")));
    }
    let mut out = Vec::with_capacity((1usize << k) - k - 1);
    for size in 2..=k {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            // advance to the next combination in lexicographic order
            let Some(i) = (0..size).rev().find(|&i| combo[i] < k - size + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Offspring weights for one target task: a weight per task model, one
/// total weight for all product components and its split `lambda` across
/// the subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMixtureSpec {
    task_weights: Vec<f64>,
    product_weight: f64,
    subset_weights: Vec<f64>,
}

impl ProductMixtureSpec {
    /// `subset_weights` defaults to uniform over all subsets of size >= 2.
    pub fn new(task_weights: Vec<f64>, product_weight: f64, subset_weights: Option<Vec<f64>>) -> Result<Self> {
        let n_subsets = enumerate_product_subsets(task_weights.len())?.len();
        let subset_weights = subset_weights.unwrap_or_else(|| vec![1.0 / n_subsets as f64; n_subsets]);
        if subset_weights.len() != n_subsets {
            return Err(Error::arg(format!(
                "{} subset weights for {n_subsets} subsets",
                subset_weights.len()
            )));
        }
        let all = task_weights.iter().chain(&subset_weights).chain(std::iter::once(&product_weight));
        if let Some(w) = all.clone().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::arg(format!("weight {w} is negative or not finite")));
        }
        let total: f64 = task_weights.iter().sum::<f64>() + product_weight;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("task and product weights sum to {total}, not 1")));
        }
        let lambda: f64 = subset_weights.iter().sum();
        if (lambda - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("subset weights sum to {lambda}, not 1")));
        }
        Ok(Self {
            task_weights,
            product_weight,
            subset_weights,
        })
    }

    pub fn task_weights(&self) -> &[f64] {
        &self.task_weights
    }

    pub fn product_weight(&self) -> f64 {
        self.product_weight
    }

    pub fn subset_weights(&self) -> &[f64] {
        &self.subset_weights
    }

    pub fn n_tasks(&self) -> usize {
        self.task_weights.len()
    }
}

/// Offspring for one task drawn from `sum_i w_i p_i(x)` over the task
/// models. Each draw is tagged with its source component.
pub fn sample_mixture_offspring(
    task_models: &[GaussianModel],
    weights: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<(Genome, Source)>> {
    let mix = MixtureSpec::new(task_models.to_vec(), weights.to_vec())?;
    Ok(sample_mixture(&mix, n, rng)?
        .into_iter()
        .map(|(x, k)| (x, Source::Task(k)))
        .collect())
}

/// The normalised product of the task models of every subset, in
/// [`enumerate_product_subsets`] order.
pub fn product_components(task_models: &[GaussianModel]) -> Result<Vec<GaussianModel>> {
    enumerate_product_subsets(task_models.len())?
        .iter()
        .map(|s| product_of_gaussians(&ProductSpec::new(s.iter().map(|&i| task_models[i].clone()).collect())?))
        .collect()
}

/// Offspring drawn from the task mixture plus the product-of-experts
/// components: task `i` with weight `w_i`, subset `n` with weight
/// `w_product * lambda_n`.
pub fn sample_product_mixture_offspring(
    task_models: &[GaussianModel],
    spec: &ProductMixtureSpec,
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<(Genome, Source)>> {
    let k = task_models.len();
    if k != spec.n_tasks() {
        return Err(Error::arg(format!("{k} task models for {} task weights", spec.n_tasks())));
    }
    if spec.product_weight == 0.0 {
        return sample_mixture_offspring(task_models, &spec.task_weights, n, rng);
    }
    let mut components = task_models.to_vec();
    components.extend(product_components(task_models)?);
    let mut weights = spec.task_weights.clone();
    weights.extend(spec.subset_weights.iter().map(|l| spec.product_weight * l));
    let mix = MixtureSpec::new(components, weights)?;
    Ok(sample_mixture(&mix, n, rng)?
        .into_iter()
        .map(|(x, c)| (x, if c < k { Source::Task(c) } else { Source::Product(c - k) }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<GaussianModel> {
        vec![
            GaussianModel::diagonal(vec![2.0, 8.0], &[0.2, 1.0]).unwrap(),
            GaussianModel::diagonal(vec![8.0, 2.0], &[1.0, 0.2]).unwrap(),
        ]
    }

    fn brute_force(k: usize) -> Vec<Vec<usize>> {
        let mut subsets: Vec<Vec<usize>> = (0u32..1 << k)
            .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| s.len() >= 2)
            .collect();
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        subsets
    }

    #[test]
    fn subsets() {
        assert_eq!(enumerate_product_subsets(2).unwrap(), vec![vec![0, 1]]);
        assert_eq!(
            enumerate_product_subsets(3).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        for k in 2..=8 {
            let s = enumerate_product_subsets(k).unwrap();
            assert_eq!(s.len(), (1 << k) - k - 1);
            assert_eq!(s, brute_force(k));
        }
        assert!(enumerate_product_subsets(1).is_err());
        assert!(enumerate_product_subsets(0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ProductMixtureSpec::new(vec![0.3, 0.3], 0.4, None).is_ok());
        assert!(ProductMixtureSpec::new(vec![0.3, 0.3], 0.3, None).is_err());
        assert!(ProductMixtureSpec::new(vec![0.5, -0.1], 0.6, None).is_err());
        assert!(ProductMixtureSpec::new(vec![0.2, 0.2, 0.2], 0.4, Some(vec![0.5, 0.5])).is_err());
        let s = ProductMixtureSpec::new(vec![0.2, 0.2, 0.2], 0.4, None).unwrap();
        assert_eq!(s.subset_weights(), &[0.25; 4]);
    }

    #[test]
    fn product_component_of_the_two_clouds() {
        let p = &product_components(&models()).unwrap()[0];
        assert!((p.mean()[0] - 3.0).abs() < 1e-12 && (p.mean()[1] - 3.0).abs() < 1e-12);
        assert!((p.cov()[(0, 0)] - 1.0 / 6.0).abs() < 1e-12);
        assert!(p.cov()[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn single_weight_is_own_task() {
        let out = sample_mixture_offspring(&models(), &[1.0, 0.0], 500, &mut RngStream::new(1)).unwrap();
        assert!(out.iter().all(|(_, s)| *s == Source::Task(0)));
    }

    #[test]
    fn mixture_fractions() {
        let n = 10_000;
        let out = sample_mixture_offspring(&models(), &[0.7, 0.3], n, &mut RngStream::new(2)).unwrap();
        let b = out.iter().filter(|(_, s)| *s == Source::Task(1)).count() as f64 / n as f64;
        assert!((b - 0.3).abs() < 3.0 * (0.21 / n as f64).sqrt(), "{b}");
    }

    #[test]
    fn product_fraction() {
        let n = 10_000;
        let spec = ProductMixtureSpec::new(vec![0.3, 0.3], 0.4, None).unwrap();
        let out = sample_product_mixture_offspring(&models(), &spec, n, &mut RngStream::new(3)).unwrap();
        let p = out.iter().filter(|(_, s)| *s == Source::Product(0)).count() as f64 / n as f64;
        assert!((p - 0.4).abs() < 0.015, "{p}");
    }

    #[test]
    fn zero_product_weight_reduces_to_mixture() {
        let spec = ProductMixtureSpec::new(vec![0.6, 0.4], 0.0, None).unwrap();
        let a = sample_product_mixture_offspring(&models(), &spec, 200, &mut RngStream::new(4)).unwrap();
        let b = sample_mixture_offspring(&models(), &[0.6, 0.4], 200, &mut RngStream::new(4)).unwrap();
        assert_eq!(a, b);
    }
}
