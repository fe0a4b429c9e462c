//! Scores for generated populations: 2-D convex hulls, out-of-hull "leap"
//! counts, cross-task transfer and nearest-neighbour distances.

mod hull;
mod metrics;

pub use hull::{convex_hull_2d, point_in_hull, Hull2D, HULL_TOL};
pub use metrics::{
    leap_report, mahalanobis_ood_fraction, mean_nn_distance, transfer_fraction, DominantRegion, LeapReport,
};
