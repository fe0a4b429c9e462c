//! Genetic variation operators. All are pure functions of their inputs and
//! an explicit random stream.

mod mutation;
mod obscan;
mod sbx;

pub use mutation::gaussian_mutate;
pub use obscan::{obscan, ObScanContext, ObScanParams, TieRule};
pub use sbx::{sbx_gene, sbx_pair, spread_factor, SbxParams};
