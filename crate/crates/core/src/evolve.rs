//! The generational EC loop: initialise uniformly, then repeatedly
//! evaluate, select and vary.

use rand::Rng;

use crate::population::evaluate;
use crate::selection::{select_tournament, select_truncation};
use crate::variation::{gaussian_mutate, sbx_pair, SbxParams};
use crate::{Error, Genome, Individual, Population, Result, RngStream, SearchSpace};

/// Produces offspring genomes from a selected parent pool.
pub trait Variation {
    fn offspring(
        &self,
        parents: &Population,
        n: usize,
        space: &SearchSpace,
        rng: &mut RngStream,
    ) -> Result<Vec<Genome>>;
}

/// SBX on uniformly drawn parent pairs followed by Gaussian mutation of
/// each child.
#[derive(Clone, Debug)]
pub struct SbxMutation {
    pub sbx: SbxParams,
    pub sigma: Vec<f64>,
    pub mutation_prob: f64,
}

impl Variation for SbxMutation {
    fn offspring(
        &self,
        parents: &Population,
        n: usize,
        space: &SearchSpace,
        rng: &mut RngStream,
    ) -> Result<Vec<Genome>> {
        if parents.is_empty() {
            return Err(Error::State("no parents to vary".into()));
        }
        let mut out = Vec::with_capacity(n + 1);
        while out.len() < n {
            let a = &parents.members[rng.random_range(0..parents.len())].genome;
            let b = &parents.members[rng.random_range(0..parents.len())].genome;
            let (c1, c2) = sbx_pair(a, b, &self.sbx, space, rng)?;
            for c in [c1, c2] {
                let c = if self.mutation_prob > 0.0 {
                    gaussian_mutate(&c, &self.sigma, self.mutation_prob, space, rng)?
                } else {
                    c
                };
                out.push(c);
            }
        }
        out.truncate(n);
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SelectionPolicy {
    /// Keep the `keep` fittest members.
    Truncation { keep: usize },
    /// Fill a mating pool of size `pool` by tournaments of size `tsize`.
    Tournament { pool: usize, tsize: usize },
}

impl SelectionPolicy {
    pub fn apply(&self, pop: &Population, rng: &mut RngStream) -> Result<Population> {
        match *self {
            SelectionPolicy::Truncation { keep } => select_truncation(pop, keep),
            SelectionPolicy::Tournament { pool, tsize } => select_tournament(pop, pool, tsize, rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub pop_size: usize,
    pub generations: usize,
    /// Copy the best member of each generation into the next one.
    pub elitism: bool,
    /// Stop early once the best fitness reaches this value.
    pub target_fitness: Option<f64>,
}

impl EvolveConfig {
    pub fn new(pop_size: usize, generations: usize) -> Self {
        Self {
            pop_size,
            generations,
            elitism: false,
            target_fitness: None,
        }
    }
}

/// Runs the loop and returns every evaluated generation, initial population
/// first. Without a target the history has `generations + 1` entries; with
/// one it ends at the first generation that reaches the target.
pub fn evolve<F, V>(
    space: &SearchSpace,
    f: &F,
    variation: &V,
    selection: &SelectionPolicy,
    cfg: &EvolveConfig,
    rng: &mut RngStream,
) -> Result<Vec<Population>>
where
    F: Fn(&[f64]) -> f64 + Sync,
    V: Variation + ?Sized,
{
    if cfg.pop_size < 2 {
        return Err(Error::arg(format!("population size must be >= 2, got {}", cfg.pop_size)));
    }
    let initial = Population::from_genomes((0..cfg.pop_size).map(|_| space.sample_uniform(rng)), 0);
    let mut history = vec![evaluate(initial, f)?];
    for t in 0..cfg.generations {
        let current = history.last().expect("non-empty history");
        if reached(current, cfg.target_fitness) {
            break;
        }
        let parents = selection.apply(current, rng)?;
        let mut children = variation.offspring(&parents, cfg.pop_size, space, rng)?;
        if children.len() != cfg.pop_size {
            return Err(Error::State(format!(
                "variation produced {} offspring, expected {}",
                children.len(),
                cfg.pop_size
            )));
        }
        let elite = if cfg.elitism { current.best().cloned() } else { None };
        if let Some(e) = &elite {
            children.pop();
            children.push(e.genome.clone());
        }
        let next = Population::new(children.into_iter().map(Individual::new).collect(), t + 1);
        history.push(evaluate(next, f)?);
    }
    Ok(history)
}

fn reached(pop: &Population, target: Option<f64>) -> bool {
    match (target, pop.best_fitness()) {
        (Some(t), Some(b)) => b >= t,
        _ => false,
    }
}
