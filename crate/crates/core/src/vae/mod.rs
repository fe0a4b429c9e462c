//! Conditional variational autoencoder with single-hidden-layer MLP
//! encoder and decoder, trained by hand-written backpropagation.
//!
//! The encoder maps `[x; label]` to the mean and log-variance of a
//! diagonal Gaussian over a 32-dimensional latent space. The decoder maps
//! `[z; label]` back to a point estimate of `x` under a fixed unit-variance
//! Gaussian likelihood, so the reconstruction term is a squared error.

mod io;
mod model;
mod train;

pub use io::{load_model, save_model};
pub use model::{kl_divergence, one_hot, vae_elbo, ElboTerms, VaeModel, DEFAULT_HIDDEN, LATENT_DIM};
pub use train::{batch_elbo_and_grad, vae_sample, vae_train, TrainConfig};
