//! Probabilistic models over genomes.
//!
//! Gaussians are the workhorse: [`fit_gaussian`] learns one from a parent
//! cloud, [`MixtureSpec`] combines several by weighted choice and
//! [`product_of_gaussians`] fuses several by multiplying densities. The
//! one-dimensional [`Kde`] backs the OB-Scan operator.

mod gaussian;
mod kde;
mod mixture;
mod product;

pub use gaussian::{
    fit_gaussian, gaussian_logpdf, sample_gaussian, GaussianModel, DEFAULT_REGULARIZATION,
};
pub use kde::{kde1d, Bandwidth, Kde};
pub use mixture::{sample_mixture, MixtureSpec};
pub use product::{product_of_gaussians, product_pair, ProductSpec};
