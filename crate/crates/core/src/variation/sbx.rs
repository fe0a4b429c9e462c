use rand::Rng;

use crate::{Error, Genome, Result, RngStream, SearchSpace};

/// Simulated binary crossover settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbxParams {
    /// Distribution index. Larger values keep children closer to the parents.
    pub eta: f64,
    /// Probability that a given gene is recombined at all.
    pub per_gene_prob: f64,
}

impl SbxParams {
    pub fn new(eta: f64) -> Result<Self> {
        Self::with_gene_prob(eta, 1.0)
    }

    pub fn with_gene_prob(eta: f64, per_gene_prob: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::arg(format!("SBX eta must be finite and >= 0, got {eta}")));
        }
        if !(0.0..=1.0).contains(&per_gene_prob) {
            return Err(Error::arg(format!(
                "SBX per-gene probability must lie in [0, 1], got {per_gene_prob}"
            )));
        }
        Ok(Self { eta, per_gene_prob })
    }
}

/// Spread factor beta for a uniform draw `u` in (0, 1).
pub fn spread_factor(u: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(exponent)
    }
}

/// One-gene SBX for a given uniform draw, before any clipping.
///
/// Children are `mid -/+ beta * (p2 - p1) / 2`, which is the same as
/// `((1 +/- beta) p1 + (1 -/+ beta) p2) / 2` with the midpoint kept explicit.
pub fn sbx_gene(p1: f64, p2: f64, eta: f64, u: f64) -> (f64, f64) {
    if p1 == p2 {
        return (p1, p2);
    }
    let beta = spread_factor(u, eta);
    let mid = 0.5 * (p1 + p2);
    let half = 0.5 * beta * (p2 - p1);
    (mid - half, mid + half)
}

/// Parent-centric crossover of two genomes. There is no gene swap between
/// the children; both are clipped into `space`.
pub fn sbx_pair(
    p1: &[f64],
    p2: &[f64],
    params: &SbxParams,
    space: &SearchSpace,
    rng: &mut RngStream,
) -> Result<(Genome, Genome)> {
    if p1.len() != p2.len() {
        return Err(Error::arg(format!(
            "SBX parents differ in length: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    space.check_len(p1)?;
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (&a, &b) in p1.iter().zip(p2) {
        let recombine = params.per_gene_prob >= 1.0 || rng.random::<f64>() < params.per_gene_prob;
        if recombine {
            // open interval keeps beta finite
            let u = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            let (x, y) = sbx_gene(a, b, params.eta, u);
            c1.push(x);
            c2.push(y);
        } else {
            c1.push(a);
            c2.push(b);
        }
    }
    space.clip(&mut c1);
    space.clip(&mut c2);
    Ok((c1, c2))
}
