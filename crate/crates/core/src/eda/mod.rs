//! Probabilistic EC: the estimation-of-distribution loop, Monte-Carlo
//! expected fitness, and information-geometric (natural-gradient) updates
//! of a diagonal Gaussian search distribution.

mod igo;
mod run;

pub use igo::{
    estimate_gradient, expected_fitness, igo_gradient, igo_run, igo_step, FitnessShaping,
    IgoGradient, IgoState,
};
pub use run::{
    eda_run, population_variance, EdaConfig, EdaGeneration, ModelFamily, ModelSnapshot,
    VaeEdaSettings,
};
