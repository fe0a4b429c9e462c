use rand::Rng;

use crate::distributions::{Bandwidth, Kde};
use crate::{Error, Genome, Result, RngStream};

/// How exact density ties between parents are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieRule {
    #[default]
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObScanParams {
    pub bandwidth: Bandwidth,
    pub tie_rule: TieRule,
}

/// Per-gene density estimates of a reference population, built once and
/// reused for many OB-Scan matings.
#[derive(Clone, Debug)]
pub struct ObScanContext {
    kdes: Vec<Kde>,
    tie_rule: TieRule,
}

impl ObScanContext {
    pub fn new(population: &[Genome], params: &ObScanParams) -> Result<Self> {
        let first = population
            .first()
            .ok_or_else(|| Error::arg("OB-Scan needs a non-empty population context"))?;
        let dim = first.len();
        if population.iter().any(|g| g.len() != dim) {
            return Err(Error::arg("OB-Scan context genomes differ in length"));
        }
        let kdes = (0..dim)
            .map(|i| {
                let column: Vec<f64> = population.iter().map(|g| g[i]).collect();
                Kde::new(column, params.bandwidth)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            kdes,
            tie_rule: params.tie_rule,
        })
    }

    pub fn dim(&self) -> usize {
        self.kdes.len()
    }

    /// Density of gene `gene` at `value` under the context population.
    pub fn density(&self, gene: usize, value: f64) -> f64 {
        self.kdes[gene].density(value)
    }

    /// One offspring: each gene is copied from whichever parent sits at the
    /// highest context density for that gene.
    pub fn offspring<G: AsRef<[f64]>>(&self, parents: &[G], rng: &mut RngStream) -> Result<Genome> {
        if parents.is_empty() {
            return Err(Error::arg("OB-Scan needs at least one parent"));
        }
        if let Some(p) = parents.iter().find(|p| p.as_ref().len() != self.dim()) {
            return Err(Error::arg(format!(
                "OB-Scan parent has length {}, context has dimension {}",
                p.as_ref().len(),
                self.dim()
            )));
        }
        let mut child = Vec::with_capacity(self.dim());
        let mut tied = Vec::with_capacity(parents.len());
        for (i, kde) in self.kdes.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            tied.clear();
            for (j, p) in parents.iter().enumerate() {
                let d = kde.density(p.as_ref()[i]);
                if d > best {
                    best = d;
                    tied.clear();
                    tied.push(j);
                } else if d == best {
                    tied.push(j);
                }
            }
            let pick = match (self.tie_rule, tied.len()) {
                (_, 1) => tied[0],
                (TieRule::Random, n) => tied[rng.random_range(0..n)],
            };
            child.push(parents[pick].as_ref()[i]);
        }
        Ok(child)
    }
}

/// Occurrence-based scanning crossover with Gaussian KDE densities.
///
/// Builds the per-gene KDEs from `population_context` on every call; use
/// [`ObScanContext`] directly when mating many pairs against one context.
pub fn obscan<G: AsRef<[f64]>>(
    parents: &[G],
    population_context: &[Genome],
    params: &ObScanParams,
    rng: &mut RngStream,
) -> Result<Genome> {
    if parents.is_empty() {
        return Err(Error::arg("OB-Scan needs at least one parent"));
    }
    ObScanContext::new(population_context, params)?.offspring(parents, rng)
}
