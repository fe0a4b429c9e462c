//! Parent selection schemes. Both return a new population that keeps the
//! generation counter of the input.

use rand::seq::index;

use crate::{Error, Population, Result, RngStream};

/// The `k` fittest members, best first. Ties go to the lower original index.
pub fn select_truncation(pop: &Population, k: usize) -> Result<Population> {
    check_k(pop, k)?;
    let fitness = pop.fitnesses()?;
    let mut order: Vec<usize> = (0..pop.len()).collect();
    // stable sort keeps index order among equal fitness
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    let members = order[..k]
        .iter()
        .map(|&i| pop.members[i].clone())
        .collect();
    Ok(Population::new(members, pop.generation))
}

/// `k` winners of independent tournaments. Each tournament draws `tsize`
/// distinct members uniformly; the fittest wins (lowest index on ties).
/// With `tsize == 1` this is uniform sampling with replacement.
pub fn select_tournament(
    pop: &Population,
    k: usize,
    tsize: usize,
    rng: &mut RngStream,
) -> Result<Population> {
    if k == 0 {
        return Err(Error::arg("selection size k must be positive"));
    }
    if tsize == 0 || tsize > pop.len() {
        return Err(Error::arg(format!(
            "tournament size {tsize} must lie in 1..={}",
            pop.len()
        )));
    }
    let fitness = pop.fitnesses()?;
    let members = (0..k)
        .map(|_| {
            let winner = index::sample(rng, pop.len(), tsize)
                .into_iter()
                .reduce(|best, i| {
                    match fitness[i].total_cmp(&fitness[best]) {
                        std::cmp::Ordering::Greater => i,
                        std::cmp::Ordering::Equal if i < best => i,
                        _ => best,
                    }
                })
                .expect("tsize >= 1");
            pop.members[winner].clone()
        })
        .collect();
    Ok(Population::new(members, pop.generation))
}

fn check_k(pop: &Population, k: usize) -> Result<()> {
    if k == 0 || k > pop.len() {
        return Err(Error::arg(format!(
            "selection size {k} must lie in 1..={}",
            pop.len()
        )));
    }
    Ok(())
}
