//! Evolutionary computation viewed as a generative process.
//!
//! The crate is organised around the pieces of a generation step:
//!
//! * [`population`], [`selection`] and [`evolve`] hold the classical EC loop
//!   (initialise, evaluate, select, vary).
//! * [`variation`] holds the genetic operators: parent-centric SBX, the
//!   disruptive OB-Scan operator and Gaussian mutation.
//! * [`distributions`] holds the probabilistic models that stand in for the
//!   variation step: Gaussians, mixtures, products of Gaussians and 1-D KDEs.
//! * [`eda`] implements the fit-then-sample EDA loop and an IGO
//!   natural-gradient step for diagonal Gaussians.
//! * [`vae`] is a small conditional VAE trained by hand-written backprop.
//! * [`multitask`] is the multitask engine: unified space, assortative
//!   mating and the mixture / product-of-experts offspring samplers.
//! * [`analysis`] scores generated populations (hulls, leaps, transfer).
//!
//! Everything is a maximisation problem. All randomness is drawn from an
//! explicitly passed [`RngStream`], so equal seeds give bit-identical runs.

pub mod analysis;
pub mod distributions;
pub mod eda;
mod error;
pub mod evolve;
pub mod multitask;
pub mod population;
mod rng;
pub mod selection;
mod space;
pub mod vae;
pub mod variation;

pub use error::{Error, Result};
pub use population::{Individual, Population};
pub use rng::RngStream;
pub use space::SearchSpace;

/// A real-valued genome.
pub type Genome = Vec<f64>;
