//! Two-task offspring generation from anisotropic Gaussian parent clouds:
//! mixture sampling vs multitask SBX, and mixture+product sampling vs
//! multitask SBX/OB-Scan.

use std::collections::BTreeMap;

use natgen::analysis::{convex_hull_2d, leap_report, transfer_fraction};
use natgen::distributions::{fit_gaussian, product_pair, GaussianModel, DEFAULT_REGULARIZATION};
use natgen::multitask::{
    mtec_generation, sample_mixture_offspring, sample_product_mixture_offspring, MtecConfig, Operator, OperatorPolicy,
    ProductMixtureSpec, Source, UnifiedMapping,
};
use natgen::{Genome, RngStream, SearchSpace};

use super::{finish, mean, std_dev, table, Figure, Scored};
use crate::config::ExperimentConfig;
use crate::report::{Check, Cmp, ExperimentReport};
use crate::svg::Series;
use crate::table::{fmt_num, Table};
use crate::Result;

const MEAN_A: [f64; 2] = [2.0, 8.0];
const VAR_A: [f64; 2] = [0.2, 1.0];
const MEAN_B: [f64; 2] = [8.0, 2.0];
const VAR_B: [f64; 2] = [1.0, 0.2];
/// Where the tight marginals of the two tasks meet.
const DOMINANT_CENTER: [f64; 2] = [MEAN_A[0], MEAN_B[1]];
const NATIVE_LOW: f64 = -2.0;
const NATIVE_HIGH: f64 = 12.0;

const FIG5_METHODS: [&str; 2] = ["gmm", "mtec_sbx"];
const FIG6_METHODS: [&str; 3] = ["sbx_obscan", "sbx_only", "product_mixture"];

fn true_models() -> Result<[GaussianModel; 2]> {
    Ok([
        GaussianModel::diagonal(MEAN_A.to_vec(), &VAR_A)?,
        GaussianModel::diagonal(MEAN_B.to_vec(), &VAR_B)?,
    ])
}

struct Child {
    genome: Genome,
    task: usize,
    source: String,
    operator: &'static str,
}

fn sampled(draws: Vec<(Genome, Source)>, task: usize) -> Vec<Child> {
    draws
        .into_iter()
        .map(|(genome, s)| Child {
            genome,
            task,
            source: match s {
                Source::Task(i) => format!("task{i}"),
                Source::Product(n) => format!("product{n}"),
            },
            operator: "sample",
        })
        .collect()
}

fn mtec_children(parents: &[Vec<Genome>; 2], policy: OperatorPolicy, rmp: f64, n: usize, rng: &mut RngStream) -> Result<Vec<Child>> {
    let native = SearchSpace::cube(2, NATIVE_LOW, NATIVE_HIGH)?;
    let mapping = UnifiedMapping::new(vec![native.clone(), native])?;
    let pools = parents
        .iter()
        .enumerate()
        .map(|(t, p)| p.iter().map(|g| mapping.unify(g, t)).collect::<natgen::Result<Vec<_>>>())
        .collect::<natgen::Result<Vec<_>>>()?;
    let cfg = MtecConfig::new(rmp, policy, n, 1)?;
    let off = mtec_generation(&pools, &mapping, &cfg, rng)?;
    let mut out = Vec::with_capacity(2 * n);
    for recs in off.tasks {
        for r in recs {
            let [a, b] = r.parent_tasks;
            out.push(Child {
                genome: mapping.deunify(&r.genome, r.task)?,
                task: r.task,
                source: format!("parents{}{}", a.min(b), a.max(b)),
                operator: match r.operator {
                    Operator::Sbx => "sbx",
                    Operator::ObScan => "obscan",
                },
            });
        }
    }
    Ok(out)
}

fn offspring_table(name: &str) -> Table {
    Table::new(name, &["replicate", "method", "task", "source", "operator", "x", "y"])
}

fn push_children(t: &mut Table, r: usize, method: &str, kids: &[Child]) {
    for c in kids {
        t.push(vec![
            r.to_string(),
            method.to_string(),
            c.task.to_string(),
            c.source.clone(),
            c.operator.to_string(),
            fmt_num(c.genome[0]),
            fmt_num(c.genome[1]),
        ]);
    }
}

fn figure(name: String, title: String, parents: &[Vec<Genome>; 2], kids: &[Child]) -> Figure {
    let pts = |v: &mut dyn Iterator<Item = &Genome>| v.map(|g| [g[0], g[1]]).collect::<Vec<_>>();
    let hulls = parents
        .iter()
        .map(|p| convex_hull_2d(&pts(&mut p.iter())).vertices().to_vec())
        .collect();
    Figure {
        name,
        title,
        series: vec![
            Series::new("parents A", pts(&mut parents[0].iter())),
            Series::new("parents B", pts(&mut parents[1].iter())),
            Series::new("offspring A", pts(&mut kids.iter().filter(|c| c.task == 0).map(|c| &c.genome))),
            Series::new("offspring B", pts(&mut kids.iter().filter(|c| c.task == 1).map(|c| &c.genome))),
        ],
        hulls,
    }
}

/// Draws both parent clouds, writing them to `table`.
fn parents_for(r: usize, n: usize, table: &mut Table, rng: &mut RngStream) -> Result<[Vec<Genome>; 2]> {
    let [a, b] = true_models()?;
    let out = [a.sample(n, rng)?, b.sample(n, rng)?];
    for (t, pop) in out.iter().enumerate() {
        for g in pop {
            table.push(vec![r.to_string(), t.to_string(), fmt_num(g[0]), fmt_num(g[1])]);
        }
    }
    Ok(out)
}

pub fn run_fig5(cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<ExperimentReport> {
    let reps = cfg.get_usize("replicates")?;
    let n = cfg.get_usize("n_parents")?;
    let n_off = cfg.get_usize("n_offspring")?;
    let eta = cfg.get_f64("eta")?;
    let rmp = cfg.get_f64("rmp")?;
    let weights = [cfg.get_list("weights_a")?, cfg.get_list("weights_b")?];

    let mut parents_t = Table::new("fig5_parents", &["replicate", "task", "x", "y"]);
    let mut off_t = offspring_table("fig5_offspring");
    let mut figures = Vec::new();
    for r in 0..reps {
        let mut rr = rng.split();
        let parents = parents_for(r, n, &mut parents_t, &mut rr)?;
        let models = [
            fit_gaussian(&parents[0], DEFAULT_REGULARIZATION)?,
            fit_gaussian(&parents[1], DEFAULT_REGULARIZATION)?,
        ];
        let mut gmm = Vec::new();
        for (t, w) in weights.iter().enumerate() {
            gmm.extend(sampled(sample_mixture_offspring(&models, w, n_off, &mut rr)?, t));
        }
        let mtec = mtec_children(&parents, OperatorPolicy::SbxOnly { eta }, rmp, n_off, &mut rr)?;
        push_children(&mut off_t, r, FIG5_METHODS[0], &gmm);
        push_children(&mut off_t, r, FIG5_METHODS[1], &mtec);
        if r == 0 {
            figures.push(figure("fig5_gmm".into(), "Gaussian mixture sampler".into(), &parents, &gmm));
            figures.push(figure("fig5_mtec_sbx".into(), format!("multitask SBX (eta {eta})"), &parents, &mtec));
        }
    }
    finish(cfg, vec![parents_t, off_t], figures)
}

pub fn run_fig6(cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<ExperimentReport> {
    let reps = cfg.get_usize("replicates")?;
    let n = cfg.get_usize("n_parents")?;
    let n_off = cfg.get_usize("n_offspring")?;
    let eta = cfg.get_f64("eta")?;
    let rmp = cfg.get_f64("rmp")?;
    let tw = cfg.get_f64("task_weight")?;
    let spec = ProductMixtureSpec::new(vec![tw, tw], cfg.get_f64("product_weight")?, None)?;

    let mut parents_t = Table::new("fig6_parents", &["replicate", "task", "x", "y"]);
    let mut off_t = offspring_table("fig6_offspring");
    let mut prod_t = Table::new("fig6_product", &["kind", "replicate", "mean_x", "mean_y", "cov_xx", "cov_xy", "cov_yy"]);
    let push_prod = |t: &mut Table, kind: &str, r: String, g: &GaussianModel| {
        let (m, c) = (g.mean(), g.cov());
        t.push(vec![
            kind.to_string(),
            r,
            fmt_num(m[0]),
            fmt_num(m[1]),
            fmt_num(c[(0, 0)]),
            fmt_num(c[(0, 1)]),
            fmt_num(c[(1, 1)]),
        ]);
    };
    let [ta, tb] = true_models()?;
    push_prod(&mut prod_t, "analytic", "all".into(), &product_pair(&ta, &tb)?);

    let mut figures = Vec::new();
    for r in 0..reps {
        let mut rr = rng.split();
        let parents = parents_for(r, n, &mut parents_t, &mut rr)?;
        let models = [
            fit_gaussian(&parents[0], DEFAULT_REGULARIZATION)?,
            fit_gaussian(&parents[1], DEFAULT_REGULARIZATION)?,
        ];
        push_prod(&mut prod_t, "fitted", r.to_string(), &product_pair(&models[0], &models[1])?);
        let mixed = mtec_children(&parents, OperatorPolicy::SbxOrObScanEqual { eta }, rmp, n_off, &mut rr)?;
        let control = mtec_children(&parents, OperatorPolicy::SbxOnly { eta }, rmp, n_off, &mut rr)?;
        let mut product = Vec::new();
        for t in 0..2 {
            product.extend(sampled(sample_product_mixture_offspring(&models, &spec, n_off, &mut rr)?, t));
        }
        let runs = [mixed, control, product];
        for (m, kids) in FIG6_METHODS.iter().zip(&runs) {
            push_children(&mut off_t, r, m, kids);
        }
        if r == 0 {
            let titles = [
                format!("multitask SBX (eta {eta}) / OB-Scan"),
                format!("multitask SBX only (eta {eta})"),
                "mixture + product sampler".to_string(),
            ];
            for ((m, kids), title) in FIG6_METHODS.iter().zip(&runs).zip(titles) {
                figures.push(figure(format!("fig6_{m}"), title, &parents, kids));
            }
        }
    }
    finish(cfg, vec![parents_t, off_t, prod_t], figures)
}

/// Offspring per (replicate, method) as (genome, task, source) and parents
/// per replicate.
struct Grouped {
    parents: Vec<[Vec<Genome>; 2]>,
    offspring: BTreeMap<(usize, String), Vec<(Genome, usize, String)>>,
}

fn group(tables: &[Table], prefix: &str, reps: usize) -> Result<Grouped> {
    let p = table(tables, &format!("{prefix}_parents"))?;
    let (pr, pt, px, py) = (p.ints("replicate")?, p.ints("task")?, p.nums("x")?, p.nums("y")?);
    let mut parents: Vec<[Vec<Genome>; 2]> = (0..reps).map(|_| [Vec::new(), Vec::new()]).collect();
    for i in 0..p.rows.len() {
        if pr[i] < reps && pt[i] < 2 {
            parents[pr[i]][pt[i]].push(vec![px[i], py[i]]);
        }
    }
    let o = table(tables, &format!("{prefix}_offspring"))?;
    let (or, om, ot, os) = (o.ints("replicate")?, o.strs("method")?, o.ints("task")?, o.strs("source")?);
    let (ox, oy) = (o.nums("x")?, o.nums("y")?);
    let mut offspring: BTreeMap<(usize, String), Vec<(Genome, usize, String)>> = BTreeMap::new();
    for i in 0..o.rows.len() {
        offspring
            .entry((or[i], om[i].to_string()))
            .or_default()
            .push((vec![ox[i], oy[i]], ot[i], os[i].to_string()));
    }
    Ok(Grouped { parents, offspring })
}

impl Grouped {
    fn kids(&self, r: usize, method: &str) -> &[(Genome, usize, String)] {
        self.offspring
            .get(&(r, method.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// 3-sigma binomial half-width for a proportion `p` over `n` trials.
fn binomial_3sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n.max(1) as f64).sqrt()
}

pub(crate) fn score_fig5(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    let reps = cfg.get_usize("replicates")?;
    let weights = [cfg.get_list("weights_a")?, cfg.get_list("weights_b")?];
    let g = group(tables, "fig5", reps)?;
    let mut metrics = Vec::new();
    let mut checks = Vec::new();

    for (t, label) in ["a", "b"].iter().enumerate() {
        let own: Vec<&(Genome, usize, String)> = (0..reps).flat_map(|r| g.kids(r, "gmm")).filter(|k| k.1 == t).collect();
        let from_b = own.iter().filter(|k| k.2 == "task1").count() as f64 / own.len().max(1) as f64;
        let expected = weights[t].get(1).copied().unwrap_or(0.0);
        metrics.push((format!("gmm_component_b_fraction_{label}"), from_b));
        checks.push(Check::new(
            format!("gmm_provenance_{label}"),
            (from_b - expected).abs(),
            Cmp::Le,
            binomial_3sigma(expected, own.len()),
        ));
    }
    for m in FIG5_METHODS {
        let mut transfer = [Vec::new(), Vec::new()];
        let mut leap = Vec::new();
        for r in 0..reps {
            let [pa, pb] = &g.parents[r];
            let pts = |v: &[Genome]| v.iter().map(|x| [x[0], x[1]]).collect::<Vec<_>>();
            let (ha, hb) = (convex_hull_2d(&pts(pa)), convex_hull_2d(&pts(pb)));
            let kids = g.kids(r, m);
            let labelled: Vec<(Genome, usize)> = kids.iter().map(|k| (k.0.clone(), k.1)).collect();
            let tf = transfer_fraction(&labelled, &ha, &hb)?;
            transfer[0].push(tf[0]);
            transfer[1].push(tf[1]);
            let genomes: Vec<Genome> = kids.iter().map(|k| k.0.clone()).collect();
            leap.push(leap_report(&genomes, pa, pb, DOMINANT_CENTER, 3.0 * VAR_B[1].sqrt())?.leap_fraction);
        }
        for (t, label) in ["a", "b"].iter().enumerate() {
            let v = mean(&transfer[t]);
            metrics.push((format!("transfer_{m}_{label}"), v));
            checks.push(Check::new(format!("transfer_{m}_{label}_positive"), v, Cmp::Gt, 0.0));
        }
        let l = mean(&leap);
        metrics.push((format!("leap_{m}"), l));
        checks.push(Check::new(format!("leap_{m}_tied_to_hulls"), l, Cmp::Lt, 0.02));
    }
    Ok((metrics, checks))
}

pub(crate) fn score_fig6(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    let reps = cfg.get_usize("replicates")?;
    let radius = cfg.get_f64("dominant_radius")?;
    let product_weight = cfg.get_f64("product_weight")?;
    let g = group(tables, "fig6", reps)?;
    let mut metrics = Vec::new();
    let mut checks = Vec::new();

    let mut leap = BTreeMap::new();
    let mut dominant = BTreeMap::new();
    for m in FIG6_METHODS {
        let (mut l, mut d) = (Vec::new(), Vec::new());
        for r in 0..reps {
            let [pa, pb] = &g.parents[r];
            let genomes: Vec<Genome> = g.kids(r, m).iter().map(|k| k.0.clone()).collect();
            let rep = leap_report(&genomes, pa, pb, DOMINANT_CENTER, radius)?;
            l.push(rep.leap_fraction);
            d.push(rep.dominant_fraction);
        }
        metrics.push((format!("leap_{m}"), mean(&l)));
        metrics.push((format!("dominant_{m}"), mean(&d)));
        leap.insert(m, mean(&l));
        dominant.insert(m, mean(&d));
    }
    checks.push(Check::new("leap_sbx_obscan_min", leap["sbx_obscan"], Cmp::Ge, 0.03));
    checks.push(Check::new("leap_sbx_only_max", leap["sbx_only"], Cmp::Lt, 0.005));
    checks.push(Check::new(
        "leap_control_not_above_mixed",
        leap["sbx_only"] - leap["sbx_obscan"],
        Cmp::Le,
        0.0,
    ));
    let ratio = dominant["sbx_obscan"] / dominant["product_mixture"];
    metrics.push(("dominant_ratio".into(), ratio));
    checks.push(Check::new("dominant_ratio_low", ratio, Cmp::Ge, 0.5));
    checks.push(Check::new("dominant_ratio_high", ratio, Cmp::Le, 2.0));

    let all: Vec<&(Genome, usize, String)> = (0..reps).flat_map(|r| g.kids(r, "product_mixture")).collect();
    let n_prod = all.iter().filter(|k| k.2 == "product0").count();
    let frac = n_prod as f64 / all.len().max(1) as f64;
    metrics.push(("product_fraction".into(), frac));
    checks.push(Check::new("product_fraction_dev", (frac - product_weight).abs(), Cmp::Le, 0.015));

    let mut rep_means = [Vec::new(), Vec::new()];
    for r in 0..reps {
        let prod: Vec<&Genome> = g.kids(r, "product_mixture").iter().filter(|k| k.2 == "product0").map(|k| &k.0).collect();
        if prod.is_empty() {
            continue;
        }
        for (i, col) in rep_means.iter_mut().enumerate() {
            col.push(prod.iter().map(|x| x[i]).sum::<f64>() / prod.len() as f64);
        }
    }
    let target = product_pair(&true_models()?[0], &true_models()?[1])?;
    for (i, axis) in ["x", "y"].iter().enumerate() {
        let m = mean(&rep_means[i]);
        let se = std_dev(&rep_means[i]) / (rep_means[i].len().max(1) as f64).sqrt();
        metrics.push((format!("product_cluster_mean_{axis}"), m));
        metrics.push((format!("product_cluster_se_{axis}"), se));
        checks.push(Check::new(
            format!("product_cluster_mean_{axis}_dev"),
            (m - target.mean()[i]).abs(),
            Cmp::Le,
            3.0 * se,
        ));
    }

    let p = table(tables, "fig6_product")?;
    let kinds = p.strs("kind")?;
    let row = kinds
        .iter()
        .position(|k| *k == "analytic")
        .ok_or_else(|| crate::CliError::data("fig6_product.csv", "no analytic row"))?;
    let col = |c: &str| -> Result<f64> { Ok(p.nums(c)?[row]) };
    let analytic = [col("mean_x")?, col("mean_y")?, col("cov_xx")?, col("cov_xy")?, col("cov_yy")?];
    let expected = [3.0, 3.0, 1.0 / 6.0, 0.0, 1.0 / 6.0];
    for (name, v) in ["product_mean_x", "product_mean_y", "product_cov_xx", "product_cov_xy", "product_cov_yy"]
        .iter()
        .zip(analytic)
    {
        metrics.push((name.to_string(), v));
    }
    let dev = analytic.iter().zip(expected).map(|(a, e)| (a - e).abs()).fold(0.0, f64::max);
    checks.push(Check::new("product_params_exact", dev, Cmp::Le, 1e-12));
    Ok((metrics, checks))
}
