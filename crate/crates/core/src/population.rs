//! Individuals, populations and (parallel) fitness evaluation.

use rayon::prelude::*;

use crate::{Error, Genome, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    /// Skill factor in multitask runs; `None` for single-task runs.
    pub task_id: Option<usize>,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(genome: Genome) -> Self {
        Self {
            genome,
            task_id: None,
            fitness: None,
        }
    }

    pub fn with_task(genome: Genome, task_id: usize) -> Self {
        Self {
            genome,
            task_id: Some(task_id),
            fitness: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, generation: usize) -> Self {
        Self {
            members,
            generation,
        }
    }

    pub fn from_genomes(genomes: impl IntoIterator<Item = Genome>, generation: usize) -> Self {
        Self::new(genomes.into_iter().map(Individual::new).collect(), generation)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn genomes(&self) -> impl Iterator<Item = &Genome> {
        self.members.iter().map(|m| &m.genome)
    }

    /// Fitness values in member order. Fails if any member is unevaluated.
    pub fn fitnesses(&self) -> Result<Vec<f64>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.fitness
                    .ok_or_else(|| Error::State(format!("member {i} has not been evaluated")))
            })
            .collect()
    }

    /// Highest fitness among evaluated members.
    pub fn best_fitness(&self) -> Option<f64> {
        self.members
            .iter()
            .filter_map(|m| m.fitness)
            .max_by(f64::total_cmp)
    }

    pub fn best(&self) -> Option<&Individual> {
        self.members
            .iter()
            .filter(|m| m.fitness.is_some())
            .rev()
            .max_by(|a, b| a.fitness.unwrap().total_cmp(&b.fitness.unwrap()))
    }
}

/// Evaluates every member with `f` (maximised). Members are scored in
/// parallel; results land in member order, so the outcome does not depend
/// on thread scheduling.
pub fn evaluate<F>(mut pop: Population, f: &F) -> Result<Population>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let scores: Vec<f64> = pop.members.par_iter().map(|m| f(&m.genome)).collect();
    for (member, score) in pop.members.iter_mut().zip(scores) {
        if !score.is_finite() {
            return Err(Error::NonFiniteFitness {
                genome: member.genome.clone(),
                value: score,
            });
        }
        member.fitness = Some(score);
    }
    Ok(pop)
}
