use super::hull::{convex_hull_2d, Hull2D, HULL_TOL};
use crate::distributions::{fit_gaussian, DEFAULT_REGULARIZATION};
use crate::{Error, Genome, Result};

/// A disc around the point where dominant traits of two tasks meet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominantRegion {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeapReport {
    pub n_offspring: usize,
    pub n_outside_both_hulls: usize,
    pub leap_fraction: f64,
    pub n_in_dominant_region: usize,
    pub dominant_fraction: f64,
    pub region: DominantRegion,
}

fn as_point(g: &[f64]) -> Result<[f64; 2]> {
    match g {
        [x, y] => Ok([*x, *y]),
        _ => Err(Error::arg(format!("hull analysis is 2-D only, got length {}", g.len()))),
    }
}

fn points(gs: &[Genome]) -> Result<Vec<[f64; 2]>> {
    gs.iter().map(|g| as_point(g)).collect()
}

fn frac(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

/// Counts offspring outside the hulls of both parent sets, and offspring
/// within `dominant_radius` of `dominant_center`.
pub fn leap_report(
    offspring: &[Genome],
    parents_a: &[Genome],
    parents_b: &[Genome],
    dominant_center: [f64; 2],
    dominant_radius: f64,
) -> Result<LeapReport> {
    let off = points(offspring)?;
    let ha = convex_hull_2d(&points(parents_a)?);
    let hb = convex_hull_2d(&points(parents_b)?);
    let outside = off
        .iter()
        .filter(|p| !ha.contains(**p, HULL_TOL) && !hb.contains(**p, HULL_TOL))
        .count();
    let dominant = off
        .iter()
        .filter(|p| (p[0] - dominant_center[0]).hypot(p[1] - dominant_center[1]) <= dominant_radius)
        .count();
    Ok(LeapReport {
        n_offspring: off.len(),
        n_outside_both_hulls: outside,
        leap_fraction: frac(outside, off.len()),
        n_in_dominant_region: dominant,
        dominant_fraction: frac(dominant, off.len()),
        region: DominantRegion {
            center: dominant_center,
            radius: dominant_radius,
        },
    })
}

/// For offspring labelled 0 (task A) or 1 (task B): the fraction of task-A
/// offspring inside `hull_b` and of task-B offspring inside `hull_a`.
/// Other labels are ignored; an empty group scores 0.
pub fn transfer_fraction(offspring: &[(Genome, usize)], hull_a: &Hull2D, hull_b: &Hull2D) -> Result<[f64; 2]> {
    let mut inside = [0usize; 2];
    let mut total = [0usize; 2];
    for (g, label) in offspring {
        let other = match label {
            0 => hull_b,
            1 => hull_a,
            _ => continue,
        };
        total[*label] += 1;
        if other.contains(as_point(g)?, HULL_TOL) {
            inside[*label] += 1;
        }
    }
    Ok([frac(inside[0], total[0]), frac(inside[1], total[1])])
}

/// Mean Euclidean distance from each offspring to its nearest reference
/// point. Works in any dimension; the search sweeps outwards from each
/// query along the reference set sorted by the first coordinate.
pub fn mean_nn_distance(offspring: &[Genome], reference: &[Genome]) -> Result<f64> {
    if offspring.is_empty() || reference.is_empty() {
        return Err(Error::arg("nearest-neighbour distance needs non-empty sets"));
    }
    let d = reference[0].len();
    if d == 0 || offspring.iter().chain(reference).any(|g| g.len() != d) {
        return Err(Error::arg("nearest-neighbour sets must share one positive dimension"));
    }
    let mut refs: Vec<&Genome> = reference.iter().collect();
    refs.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();

    let mut total = 0.0;
    for q in offspring {
        let start = refs.partition_point(|r| r[0] < q[0]);
        let mut best = f64::INFINITY;
        for r in &refs[start..] {
            let dx = r[0] - q[0];
            if dx * dx > best {
                break;
            }
            best = best.min(sq(r, q));
        }
        for r in refs[..start].iter().rev() {
            let dx = q[0] - r[0];
            if dx * dx > best {
                break;
            }
            best = best.min(sq(r, q));
        }
        total += best.sqrt();
    }
    Ok(total / offspring.len() as f64)
}

/// Dimension-free fallback for hull checks: the fraction of offspring whose
/// Mahalanobis distance exceeds `threshold` under Gaussians fitted to both
/// parent sets.
pub fn mahalanobis_ood_fraction(
    offspring: &[Genome],
    parents_a: &[Genome],
    parents_b: &[Genome],
    threshold: f64,
) -> Result<f64> {
    let ga = fit_gaussian(parents_a, DEFAULT_REGULARIZATION)?;
    let gb = fit_gaussian(parents_b, DEFAULT_REGULARIZATION)?;
    let t2 = threshold * threshold;
    let mut k = 0;
    for x in offspring {
        if ga.mahalanobis_sq(x)? > t2 && gb.mahalanobis_sq(x)? > t2 {
            k += 1;
        }
    }
    Ok(frac(k, offspring.len()))
}
