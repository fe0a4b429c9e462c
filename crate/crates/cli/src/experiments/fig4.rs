//! Offspring of a conditional VAE-EDA and of SBX at two distribution
//! indices, drawn from two structured parent populations.

use std::f64::consts::PI;

use natgen::analysis::mean_nn_distance;
use natgen::vae::{one_hot, vae_sample, vae_train, TrainConfig, VaeModel, LATENT_DIM};
use natgen::variation::{sbx_pair, SbxParams};
use natgen::{Genome, RngStream, SearchSpace};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{finish, table, Figure, Scored};
use crate::config::ExperimentConfig;
use crate::report::{Check, Cmp, ExperimentReport};
use crate::svg::Series;
use crate::table::{fmt_num, Table};
use crate::Result;

const POPULATIONS: [&str; 2] = ["two_moons", "ring_blob"];

fn normal(rng: &mut RngStream) -> f64 {
    rng.sample(StandardNormal)
}

/// Two interleaved half circles, half the points on each, with isotropic
/// Gaussian noise.
pub fn two_moons(n: usize, noise: f64, rng: &mut RngStream) -> Vec<Genome> {
    (0..n)
        .map(|i| {
            let t = PI * rng.random::<f64>();
            let (x, y) = if i < n / 2 {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), 0.5 - t.sin())
            };
            vec![x + noise * normal(rng), y + noise * normal(rng)]
        })
        .collect()
}

/// A noisy ring around the origin with a Gaussian blob at its centre.
pub fn ring_blob(n: usize, radius: f64, noise: f64, blob_fraction: f64, blob_std: f64, rng: &mut RngStream) -> Vec<Genome> {
    let n_blob = (blob_fraction * n as f64).round() as usize;
    (0..n)
        .map(|i| {
            if i < n - n_blob {
                let a = 2.0 * PI * rng.random::<f64>();
                vec![
                    radius * a.cos() + noise * normal(rng),
                    radius * a.sin() + noise * normal(rng),
                ]
            } else {
                vec![blob_std * normal(rng), blob_std * normal(rng)]
            }
        })
        .collect()
}

fn methods(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    Ok(vec![
        "vae".to_string(),
        format!("sbx_eta{}", cfg.get_f64("eta_low")?),
        format!("sbx_eta{}", cfg.get_f64("eta_high")?),
    ])
}

fn sbx_offspring(parents: &[Genome], n: usize, eta: f64, rng: &mut RngStream) -> Result<Vec<Genome>> {
    let params = SbxParams::new(eta)?;
    let space = SearchSpace::cube(2, -100.0, 100.0)?;
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let pick = index::sample(rng, parents.len(), 2);
        let (a, b) = sbx_pair(&parents[pick.index(0)], &parents[pick.index(1)], &params, &space, rng)?;
        out.push(a);
        out.push(b);
    }
    out.truncate(n);
    Ok(out)
}

pub fn run_fig4(cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<ExperimentReport> {
    let n = cfg.get_usize("n_parents")?;
    let n_off = cfg.get_usize("n_offspring")?;
    let pops = [
        two_moons(n, cfg.get_f64("moons_noise")?, rng),
        ring_blob(
            n,
            cfg.get_f64("ring_radius")?,
            cfg.get_f64("ring_noise")?,
            cfg.get_f64("blob_fraction")?,
            cfg.get_f64("blob_std")?,
            rng,
        ),
    ];
    let mut parents = Table::new("fig4_parents", &["population", "x", "y"]);
    for (p, pop) in pops.iter().enumerate() {
        for g in pop {
            parents.push(vec![p.to_string(), fmt_num(g[0]), fmt_num(g[1])]);
        }
    }

    let data: Vec<(Genome, Vec<f64>)> = pops
        .iter()
        .enumerate()
        .flat_map(|(p, pop)| pop.iter().map(move |g| (g.clone(), one_hot(p, 2))))
        .collect();
    let train = TrainConfig {
        learning_rate: cfg.get_f64("vae_learning_rate")?,
        epochs: cfg.get_usize("vae_epochs")?,
        batch_size: cfg.get_usize("vae_batch_size")?,
        kl_weight: cfg.get_f64("vae_kl_weight")?,
    };
    let model = VaeModel::new(2, 2, cfg.get_usize("vae_hidden")?, LATENT_DIM, 0.1, rng)?;
    let (model, trace) = vae_train(model, &data, &train, rng)?;
    let mut elbo = Table::new("fig4_elbo", &["epoch", "elbo"]);
    for (e, v) in trace.iter().enumerate() {
        elbo.push(vec![e.to_string(), fmt_num(*v)]);
    }

    let names = methods(cfg)?;
    let etas = [cfg.get_f64("eta_low")?, cfg.get_f64("eta_high")?];
    let mut offspring = Table::new("fig4_offspring", &["method", "population", "x", "y"]);
    let mut figures = Vec::new();
    for (m, name) in names.iter().enumerate() {
        let mut series: Vec<Series> = pops
            .iter()
            .enumerate()
            .map(|(p, pop)| Series::new(format!("parents {}", POPULATIONS[p]), pop.iter().map(|g| [g[0], g[1]]).collect()))
            .collect();
        for (p, pop) in pops.iter().enumerate() {
            let kids = if m == 0 {
                vae_sample(&model, &one_hot(p, 2), n_off, rng)?
            } else {
                sbx_offspring(pop, n_off, etas[m - 1], rng)?
            };
            for g in &kids {
                offspring.push(vec![name.clone(), p.to_string(), fmt_num(g[0]), fmt_num(g[1])]);
            }
            series.push(Series::new(
                format!("offspring {}", POPULATIONS[p]),
                kids.iter().map(|g| [g[0], g[1]]).collect(),
            ));
        }
        figures.push(Figure {
            name: format!("fig4_{name}"),
            title: format!("{name}: parents and offspring"),
            series,
            hulls: Vec::new(),
        });
    }
    finish(cfg, vec![parents, offspring, elbo], figures)
}

fn diameter(points: &[Genome]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

fn points_of(t: &Table, filter: impl Fn(usize) -> bool) -> Result<Vec<Genome>> {
    let (x, y) = (t.nums("x")?, t.nums("y")?);
    Ok((0..t.rows.len()).filter(|&i| filter(i)).map(|i| vec![x[i], y[i]]).collect())
}

pub(crate) fn score(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    let parents = table(tables, "fig4_parents")?;
    let offspring = table(tables, "fig4_offspring")?;
    let elbo = table(tables, "fig4_elbo")?.nums("elbo")?;
    let pop_of = parents.ints("population")?;
    let off_pop = offspring.ints("population")?;
    let off_method = offspring.strs("method")?;
    let names = methods(cfg)?;

    let mut metrics = Vec::new();
    let mut checks = Vec::new();
    for (p, label) in POPULATIONS.iter().enumerate() {
        let pop = points_of(parents, |i| pop_of[i] == p)?;
        let diam = diameter(&pop);
        metrics.push((format!("diameter_{label}"), diam));
        let mut nn = Vec::new();
        for name in &names {
            let kids = points_of(offspring, |i| off_pop[i] == p && off_method[i] == name)?;
            let d = mean_nn_distance(&kids, &pop)?;
            metrics.push((format!("nn_{name}_{label}"), d));
            checks.push(Check::new(format!("nn_{name}_{label}_in_distribution"), d, Cmp::Lt, 0.5 * diam));
            nn.push(d);
        }
        checks.push(Check::new(format!("sbx_eta_ratio_{label}"), nn[2] / nn[1], Cmp::Lt, 1.0));
    }
    if let (Some(first), Some(last)) = (elbo.first(), elbo.last()) {
        metrics.push(("elbo_first_epoch".into(), *first));
        metrics.push(("elbo_last_epoch".into(), *last));
    }
    Ok((metrics, checks))
}
