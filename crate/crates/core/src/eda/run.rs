use nalgebra::DMatrix;

use crate::distributions::{fit_gaussian, GaussianModel, DEFAULT_REGULARIZATION};
use crate::population::evaluate;
use crate::selection::select_truncation;
use crate::vae::{vae_sample, vae_train, TrainConfig, VaeModel, DEFAULT_HIDDEN, LATENT_DIM};
use crate::{Error, Genome, Individual, Population, Result, RngStream, SearchSpace};

/// Settings for the VAE-backed model family. The VAE is unconditional
/// here (empty label).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VaeEdaSettings {
    pub hidden: usize,
    pub init_scale: f64,
    pub train: TrainConfig,
}

impl Default for VaeEdaSettings {
    fn default() -> Self {
        Self {
            hidden: DEFAULT_HIDDEN,
            init_scale: 0.1,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelFamily {
    GaussianFull,
    GaussianDiag,
    Vae(VaeEdaSettings),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdaConfig {
    pub pop_size: usize,
    pub parent_fraction: f64,
    pub generations: usize,
    pub model_family: ModelFamily,
    /// Carry the best member of each generation over unchanged.
    pub elitism: bool,
    pub regularization: f64,
    /// Stop once every marginal variance of a fitted Gaussian model falls
    /// below this value. Zero disables the test.
    pub min_variance: f64,
}

impl EdaConfig {
    pub fn new(pop_size: usize, parent_fraction: f64, generations: usize, model_family: ModelFamily) -> Self {
        Self {
            pop_size,
            parent_fraction,
            generations,
            model_family,
            elitism: false,
            regularization: DEFAULT_REGULARIZATION,
            min_variance: 0.0,
        }
    }

    /// Number of truncation-selected parents per generation.
    pub fn parent_count(&self) -> usize {
        (self.parent_fraction * self.pop_size as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::arg(format!("EDA population must be >= 4, got {}", self.pop_size)));
        }
        if !(self.parent_fraction > 0.0 && self.parent_fraction <= 1.0) {
            return Err(Error::arg("parent fraction must lie in (0, 1]"));
        }
        if !(self.min_variance >= 0.0) {
            return Err(Error::arg("minimum variance must be >= 0"));
        }
        if self.parent_count() < 2 {
            return Err(Error::arg("parent fraction selects fewer than two parents"));
        }
        Ok(())
    }
}

/// Model fitted to the parents of one generation.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSnapshot {
    Gaussian(GaussianModel),
    Vae(VaeModel),
}

impl ModelSnapshot {
    /// Draws `n` genomes from the model (before clipping).
    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<Genome>> {
        match self {
            ModelSnapshot::Gaussian(g) => g.sample(n, rng),
            ModelSnapshot::Vae(v) => vae_sample(v, &[], n, rng),
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianModel> {
        match self {
            ModelSnapshot::Gaussian(g) => Some(g),
            ModelSnapshot::Vae(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdaGeneration {
    pub population: Population,
    /// Model fitted to the previous generation's parents; `None` at t = 0.
    pub model: Option<ModelSnapshot>,
    /// Seed of the stream the sampled members were drawn from. Replaying
    /// `model.sample` on a fresh stream with this seed reproduces them.
    pub sample_seed: Option<u64>,
}

/// Fit-then-sample loop. Generation `t + 1` is drawn entirely from the model
/// fitted to the truncation-selected parents of generation `t` (except the
/// carried-over elite when elitism is on; it is placed last).
pub fn eda_run<F>(space: &SearchSpace, f: &F, cfg: &EdaConfig, rng: &mut RngStream) -> Result<Vec<EdaGeneration>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let initial = Population::from_genomes((0..cfg.pop_size).map(|_| space.sample_uniform(rng)), 0);
    let mut history = vec![EdaGeneration {
        population: evaluate(initial, f)?,
        model: None,
        sample_seed: None,
    }];
    for t in 0..cfg.generations {
        let current = &history.last().expect("non-empty").population;
        let parents = select_truncation(current, cfg.parent_count())?;
        let genomes: Vec<&[f64]> = parents.genomes().map(|g| g.as_slice()).collect();
        let model = fit_model(&genomes, space.dim(), cfg, rng)?;
        if let Some(g) = model.as_gaussian() {
            if g.cov().diagonal().iter().all(|v| *v < cfg.min_variance) {
                break;
            }
        }

        let elite = if cfg.elitism { current.best().cloned() } else { None };
        let n_sampled = cfg.pop_size - usize::from(elite.is_some());
        let mut sample_rng = rng.split();
        let sample_seed = sample_rng.seed();
        let mut members: Vec<Individual> = model
            .sample(n_sampled, &mut sample_rng)?
            .into_iter()
            .map(|g| Individual::new(space.clipped(g)))
            .collect();
        if let Some(e) = elite {
            members.push(Individual::new(e.genome));
        }
        let next = evaluate(Population::new(members, t + 1), f)?;
        history.push(EdaGeneration {
            population: next,
            model: Some(model),
            sample_seed: Some(sample_seed),
        });
    }
    Ok(history)
}

fn fit_model(parents: &[&[f64]], dim: usize, cfg: &EdaConfig, rng: &mut RngStream) -> Result<ModelSnapshot> {
    match cfg.model_family {
        ModelFamily::GaussianFull => Ok(ModelSnapshot::Gaussian(fit_gaussian(parents, cfg.regularization)?)),
        ModelFamily::GaussianDiag => {
            let full = fit_gaussian(parents, cfg.regularization)?;
            let diag = DMatrix::from_diagonal(&full.cov().diagonal());
            Ok(ModelSnapshot::Gaussian(GaussianModel::new(
                full.mean().iter().copied().collect(),
                diag,
            )?))
        }
        ModelFamily::Vae(settings) => {
            let model = VaeModel::new(dim, 0, settings.hidden, LATENT_DIM, settings.init_scale, rng)?;
            let data: Vec<(Genome, Vec<f64>)> = parents.iter().map(|p| (p.to_vec(), Vec::new())).collect();
            let (trained, _) = vae_train(model, &data, &settings.train, rng)?;
            Ok(ModelSnapshot::Vae(trained))
        }
    }
}

/// Per-dimension (population, divide-by-n) variance of a population.
pub fn population_variance(pop: &Population) -> Vec<f64> {
    let n = pop.len();
    if n == 0 {
        return Vec::new();
    }
    let d = pop.members[0].genome.len();
    let mut mean = vec![0.0; d];
    for g in pop.genomes() {
        for (m, v) in mean.iter_mut().zip(g) {
            *m += v / n as f64;
        }
    }
    let mut var = vec![0.0; d];
    for g in pop.genomes() {
        for ((s, v), m) in var.iter_mut().zip(g).zip(&mean) {
            *s += (v - m).powi(2) / n as f64;
        }
    }
    var
}
