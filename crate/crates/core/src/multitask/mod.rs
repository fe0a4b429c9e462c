//! Multitask evolution in a shared unified space.
//!
//! Every task keeps its own native box; genomes live in `[0, 1]^d` where
//! `d` is the largest task dimension. Offspring can come from MFEA-style
//! assortative mating ([`mtec_generation`]) or from probabilistic samplers
//! over per-task Gaussian models ([`sample_mixture_offspring`],
//! [`sample_product_mixture_offspring`]).

mod mapping;
mod mating;
mod sampling;

pub use mapping::{TaskSpec, UnifiedMapping};
pub use mating::{
    mtec_generation, mtec_run, MatingStats, MtecConfig, MtecOffspring, OffspringRecord, Operator, OperatorPolicy,
};
pub use sampling::{
    enumerate_product_subsets, product_components, sample_mixture_offspring, sample_product_mixture_offspring,
    ProductMixtureSpec, Source,
};
